"""Command-line front end.

Exit status: 0 on success, 1 when a theorem-exact audit record fails,
2 on usage, parse, validation or I/O errors. Data goes to standard output
or ``--output``; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audit import InequalityAudit
from .choquet import NormParams, choquet_over_set, duality_audit, holder_audit, lp_norm
from .content import (
    cubic_content_1d,
    dyadic_content,
    dyadic_content_witness,
    exhaustive_dyadic_oracle,
    weighted_capacity,
    weighted_dyadic_content,
)
from .extrapolation import (
    audit_part_a,
    audit_part_b,
    check_weight_spec,
    operator_norm_sweep,
    sweep_csv,
)
from .grid import (
    ContentParams,
    DyadicSet,
    GridFunction,
    GridSpec,
    Weight,
    format_number,
    parse_dyadic_set,
    parse_grid_function,
    random_function,
    random_set,
    serialize_dyadic_set,
    serialize_grid_function,
)
from .maximal import kolmogorov_audit, make_operator, sample_function
from .weights import (
    a1_constant,
    ap_constant,
    construct_a1,
    dual_weight,
    jones_compose,
    power_improvement_search,
    self_improvement_search,
)


class UsageError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_function(path):
    try:
        return parse_grid_function(_read(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_weight(path):
    f = _load_function(path)
    try:
        return Weight.of(f)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_set(path):
    try:
        return parse_dyadic_set(_read(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _same_grid(*objs):
    specs = {o.spec for o in objs if o is not None}
    if len(specs) > 1:
        raise UsageError("input files live on different grids: " +
                         ", ".join(f"n={s.n} L={s.L}" for s in sorted(specs, key=lambda s: (s.n, s.L))))


def _params(args, spec=None):
    try:
        params = ContentParams(args.beta)
        if spec is not None:
            params.check(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return params


def _emit(text, output):
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _emit_audit(audit: InequalityAudit, output) -> int:
    _emit(audit.to_csv(), output)
    return 0 if audit.exact_ok else 1


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _require(cond, message):
    if not cond:
        raise UsageError(message)


# -- subcommands --------------------------------------------------------------

def cmd_content(args):
    E = _load_set(args.input)
    params = _params(args, E.spec)
    modes = [m for m in ("witness", "cubic", "oracle") if getattr(args, m)]
    modes += [m for m in ("weighted", "capacity") if getattr(args, m)]
    _require(len(modes) <= 1, "choose at most one of --witness, --cubic, --oracle, --weighted, --capacity")
    if args.cubic:
        _require(E.spec.n == 1, "--cubic requires a 1D set")
        value = cubic_content_1d(E, params)
    elif args.oracle:
        _require((E.spec.n == 1 and E.spec.L <= 3) or (E.spec.n == 2 and E.spec.L <= 2),
                 "--oracle needs n=1, L<=3 or n=2, L<=2")
        value = exhaustive_dyadic_oracle(E, params)
    elif args.weighted or args.capacity:
        w = _load_weight(args.weighted or args.capacity)
        _same_grid(E, w)
        value = (weighted_dyadic_content(E, params, w) if args.weighted
                 else weighted_capacity(E, w, params))
    elif args.witness:
        witness = dyadic_content_witness(E, params)
        _emit("".join(line + "\n" for line in witness.lines()), args.output)
        return 0
    else:
        value = dyadic_content(E, params)
    _emit(format_number(value) + "\n", args.output)
    return 0


def cmd_choquet(args):
    f = _load_function(args.input)
    E = _load_set(args.set) if args.set else DyadicSet.full(f.spec)
    w = _load_weight(args.weight) if args.weight else None
    _same_grid(f, E, w)
    params = _params(args, f.spec)
    if args.p is not None:
        _require(args.p >= 1, f"--p must be >= 1, got {args.p}")
        restricted = GridFunction(f.spec, np.where(E.mask, f.values, 0.0))
        value = lp_norm(restricted, NormParams(args.p, params, w))
    else:
        _require(w is None, "--weight needs --p (weighted norms)")
        value = choquet_over_set(f, E, params)
    _emit(format_number(value) + "\n", args.output)
    return 0


def cmd_maximal(args):
    f = _load_function(args.input)
    params = _params(args, f.spec)
    T = make_operator(args.op, params)
    _emit(serialize_grid_function(T(f)), args.output)
    return 0


def cmd_generate(args):
    try:
        spec = GridSpec(args.dim, args.level)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.density is not None:
        _require(0 <= args.density <= 1, "--density must lie in [0, 1]")
        _emit(serialize_dyadic_set(random_set(spec, args.density, args.seed)), args.output)
    elif args.sparse:
        _emit(serialize_grid_function(sample_function(spec, args.seed)), args.output)
    else:
        _emit(serialize_grid_function(random_function(spec, args.seed)), args.output)
    return 0


def cmd_weights(args):
    action = args.action
    if action in ("ap", "a1", "dual", "improve"):
        w = _load_weight(args.input)
        params = _params(args, w.spec) if action != "dual" else None
        if action == "ap":
            _require(args.p > 1, f"--p must be > 1, got {args.p}")
            report = ap_constant(w, args.p, params)
            lines = [format_number(report.constant), f"witness {report.witness_cube}"]
            if args.per_cube:
                lines += [f"{q} {format_number(v)}" for q, v in report.per_cube.items()]
            _emit("\n".join(lines) + "\n", args.output)
        elif action == "a1":
            _emit(format_number(a1_constant(w, params)) + "\n", args.output)
        elif action == "dual":
            _require(args.p > 1, f"--p must be > 1, got {args.p}")
            _emit(serialize_grid_function(dual_weight(w, args.p)), args.output)
        else:
            if args.mode == "power":
                _require(args.p >= 1, f"--p must be >= 1, got {args.p}")
                value = power_improvement_search(w, args.p, params, args.cap)
            else:
                _require(args.p > 1, f"--p must be > 1, got {args.p}")
                value = self_improvement_search(w, args.p, params, args.cap)
            _emit(format_number(value) + "\n", args.output)
        return 0
    if action == "construct-a1":
        f = _load_function(args.input)
        params = _params(args, f.spec)
        _require(0 <= args.delta < 1, f"--delta must lie in [0, 1), got {args.delta}")
        _require(not f.is_zero(), "input function vanishes identically")
        _emit(serialize_grid_function(construct_a1(f, args.delta, params)), args.output)
        return 0
    # jones
    w0, w1 = _load_weight(args.w0), _load_weight(args.w1)
    _same_grid(w0, w1)
    params = _params(args, w0.spec)
    _require(args.p >= 1, f"--p must be >= 1, got {args.p}")
    w, audit = jones_compose(w0, w1, args.p, params)
    if args.weight_output:
        _emit(serialize_grid_function(w), args.weight_output)
    return _emit_audit(audit, args.output)


def cmd_audit(args):
    kind = args.kind
    if kind == "part-a":
        f = _load_function(args.f)
        w = _load_weight(args.weight) if args.weight else None
        _same_grid(f, w)
        params = _params(args, f.spec)
        _require(1 < args.p < args.p0, f"need 1 < p < p0, got p={args.p}, p0={args.p0}")
        _require(not f.is_zero(), "f vanishes identically")
        T = make_operator(args.op, params)
        return _emit_audit(audit_part_a(T, f, w, args.p, args.p0, params), args.output)
    if kind == "part-b":
        f, u = _load_function(args.f), _load_function(args.u)
        w = _load_weight(args.weight) if args.weight else None
        _same_grid(f, u, w)
        params = _params(args, f.spec)
        T = make_operator(args.op, params)
        try:
            audit = audit_part_b(T, f, u, w, args.p, args.p1, args.s, params, p0=args.p0)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return _emit_audit(audit, args.output)
    if kind == "holder":
        f, g = _load_function(args.f), _load_function(args.g)
        _same_grid(f, g)
        params = _params(args, f.spec)
        _require(args.p >= 1, f"--p must be >= 1 (or inf), got {args.p}")
        return _emit_audit(holder_audit(f, g, args.p, params), args.output)
    if kind == "duality":
        f = _load_function(args.f)
        w = _load_weight(args.weight) if args.weight else None
        _same_grid(f, w)
        params = _params(args, f.spec)
        _require(1 < args.p < math.inf, f"--p must satisfy 1 < p < inf, got {args.p}")
        _require(args.candidates >= 0, "--candidates must be >= 0")
        cands = [random_function(f.spec, (args.seed, i)) for i in range(args.candidates)]
        return _emit_audit(duality_audit(f, NormParams(args.p, params, w), cands), args.output)
    # kolmogorov
    f, E = _load_function(args.f), _load_set(args.set)
    _same_grid(f, E)
    params = _params(args, f.spec)
    _require(0 < args.gamma < 1, f"--gamma must lie in (0, 1), got {args.gamma}")
    _require(not E.is_empty(), "set must be non-empty")
    _require(args.K > 0, "--K must be positive")
    return _emit_audit(kolmogorov_audit(f, E, args.gamma, args.K, params), args.output)


def cmd_sweep(args):
    _require(args.trials >= 1, "--trials must be >= 1")
    _require(all(p >= 1 for p in args.p), "every --p must be >= 1")
    try:
        specs = [GridSpec(args.dim, L) for L in args.resolutions]
        for desc in args.weights:
            check_weight_spec(desc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    params = _params(args, specs[0])
    T = make_operator(args.op, params)
    if args.op.startswith("avg:"):
        level = int(args.op[4:])
        _require(all(level <= s.L for s in specs), f"{args.op} exceeds the grid resolution")
    rows = operator_norm_sweep(T, args.p, args.weights, args.trials, args.seed, params,
                               specs, p0=args.p0)
    _emit(sweep_csv(rows), args.output)
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capacitary",
        description="Hausdorff contents, Choquet integrals, capacitary maximal functions and "
                    "A_p weights on dyadic grids.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, beta=True):
        if beta:
            p.add_argument("--beta", type=float, required=True, help="content exponent, 0 < beta <= n")
        p.add_argument("--output", "-o", help="write here instead of standard output")

    p = sub.add_parser("content", help="dyadic, cubic, weighted content of a set")
    p.add_argument("--input", required=True, help="set file (grid format, 0/1 values)")
    p.add_argument("--witness", action="store_true", help="print an optimal cover")
    p.add_argument("--cubic", action="store_true", help="1D cover by arbitrary intervals")
    p.add_argument("--oracle", action="store_true", help="exhaustive enumeration (tiny grids)")
    p.add_argument("--weighted", metavar="W", help="cover content weighted by mean of W")
    p.add_argument("--capacity", metavar="W", help="Choquet integral of W over the set")
    common(p)
    p.set_defaults(func=cmd_content)

    p = sub.add_parser("choquet", help="Choquet integral or weighted L^p norm")
    p.add_argument("--input", required=True)
    p.add_argument("--set", help="restrict to this set")
    p.add_argument("--p", type=float, help="report the L^p norm instead of the integral")
    p.add_argument("--weight", help="weight file for the L^p norm")
    common(p)
    p.set_defaults(func=cmd_choquet)

    p = sub.add_parser("maximal", help="apply the dyadic maximal operator (or another plugin)")
    p.add_argument("--input", required=True)
    p.add_argument("--op", default="maximal", help="identity, maximal or avg:<level>")
    common(p)
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("generate", help="write a seeded random function or set")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, help="emit a random set with this density")
    p.add_argument("--sparse", action="store_true", help="zero a random fraction of cells")
    common(p, beta=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("weights", help="Muckenhoupt constants and weight constructions")
    wsub = p.add_subparsers(dest="action", required=True)
    q = wsub.add_parser("ap", help="A_p constant")
    q.add_argument("--input", required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--per-cube", action="store_true")
    common(q)
    q = wsub.add_parser("a1", help="A_1 constant max Mw/w")
    q.add_argument("--input", required=True)
    common(q)
    q = wsub.add_parser("dual", help="dual weight w^(1-p')")
    q.add_argument("--input", required=True)
    q.add_argument("--p", type=float, required=True)
    common(q, beta=False)
    q = wsub.add_parser("construct-a1", help="(Mf)^delta")
    q.add_argument("--input", required=True)
    q.add_argument("--delta", type=float, required=True)
    common(q)
    q = wsub.add_parser("jones", help="w0 w1^(1-p) with the factorization bound audit")
    q.add_argument("--w0", required=True)
    q.add_argument("--w1", required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--weight-output", help="write the composed weight here")
    common(q)
    q = wsub.add_parser("improve", help="power (gamma) or self-improvement (q) search")
    q.add_argument("--input", required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--cap", type=float, required=True)
    q.add_argument("--mode", choices=("power", "self"), default="power")
    common(q)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("audit", help="inequality audits, CSV check_id,label,lhs,rhs,slack,holds")
    asub = p.add_subparsers(dest="kind", required=True)
    q = asub.add_parser("part-a")
    q.add_argument("--f", required=True)
    q.add_argument("--weight")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--p0", type=float, required=True)
    q.add_argument("--op", default="maximal")
    common(q)
    q = asub.add_parser("part-b")
    q.add_argument("--f", required=True)
    q.add_argument("--u", required=True)
    q.add_argument("--weight")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--p1", type=float)
    q.add_argument("--p0", type=float)
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--op", default="maximal")
    common(q)
    q = asub.add_parser("holder")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--p", type=float, required=True)
    common(q)
    q = asub.add_parser("duality")
    q.add_argument("--f", required=True)
    q.add_argument("--weight")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--candidates", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    common(q)
    q = asub.add_parser("kolmogorov")
    q.add_argument("--f", required=True)
    q.add_argument("--set", required=True)
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--K", type=float, required=True)
    common(q)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="seeded operator-norm sweep, CSV p,p0,L,seed,op,weight,ratio")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--resolutions", type=_int_list, required=True, help="e.g. 6,8,10")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=_float_list, required=True, help="e.g. 1.5,2")
    p.add_argument("--p0", type=float, default=2.0)
    p.add_argument("--op", default="maximal")
    p.add_argument("--weights", type=lambda s: [x for x in s.split(",") if x], default=["one"],
                   help="comma-separated: one, a1:<delta>")
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
