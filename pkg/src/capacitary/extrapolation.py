"""Inequality chains behind extrapolation from L^p0 to L^p, audited per instance.

Part (A) moves a weighted L^p0 bound down to 1 < p < p0 for an A_1 weight w
by passing through the weight ``w (Mf)^(p - p0)``. Part (B) reaches any
1 < p by duality against ``u`` in ``L^((p/p1)')(w dC)`` and the A_1 weight
``(M((uw)^s))^(1/s)``.

Steps that are inequalities with no free constant (Holder splits, pointwise
bounds, norm identities) are ``exact`` records and must hold up to
rounding. Steps that need a bounded operator are ``measured``: the record
keeps both sides so that lhs / rhs is the constant this instance needed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .audit import InequalityAudit
from .choquet import NormParams, choquet_integral, conjugate, lp_norm, normalize
from .grid import ContentParams, GridFunction, GridSpec, Weight, format_number
from .maximal import OperatorPlugin, dyadic_maximal, sample_function
from .weights import construct_a1, jones_compose


def _integral(spec: GridSpec, values: np.ndarray, params: ContentParams) -> float:
    return choquet_integral(GridFunction(spec, values), params)


def _ones(spec: GridSpec) -> Weight:
    return Weight(spec, np.ones(spec.cells))


@dataclass
class RdfWeight:
    """``weight = w (Mf)^(p - p0)`` and its factorization
    ``w * factor^(1 - p0)`` with ``factor = (Mf)^((p0 - p)/(p0 - 1))``."""

    weight: Weight
    factor: Weight
    audit: InequalityAudit


def build_rdf_weight(f: GridFunction, w: Weight, p: float, p0: float,
                     params: ContentParams) -> RdfWeight:
    if not 1 < p < p0:
        raise ValueError(f"need 1 < p < p0, got p={p}, p0={p0}")
    if f.is_zero():
        raise ValueError("f must not vanish identically")
    mf = dyadic_maximal(f, params).values
    v = Weight(f.spec, w.values * mf ** (p - p0))
    factor = Weight(f.spec, mf ** ((p0 - p) / (p0 - 1)))
    _, audit = jones_compose(w, factor, p0, params)
    return RdfWeight(v, factor, audit)


def audit_part_a(T: OperatorPlugin, f: GridFunction, w: Weight, p: float, p0: float,
                 params: ContentParams) -> InequalityAudit:
    """Records a1..a4, the composite consistency check and the final ratio."""
    if not 1 < p < p0:
        raise ValueError(f"need 1 < p < p0, got p={p}, p0={p0}")
    if f.is_zero():
        raise ValueError("f must not vanish identically (norm ratio divides by zero)")
    spec = f.spec
    w = _ones(spec) if w is None else w
    wv = w.values
    fv = f.values
    mf = dyadic_maximal(f, params).values
    tf = np.abs(T(f).values)
    shift = mf ** (p - p0)

    P = _integral(spec, tf ** p * wv, params)
    A = _integral(spec, tf ** p0 * shift * wv, params)
    B = _integral(spec, mf ** p * wv, params)
    A0 = _integral(spec, fv ** p0 * shift * wv, params)
    F = _integral(spec, fv ** p * wv, params)

    audit = InequalityAudit()
    theta = p / p0
    audit.add_exact("a1", "Holder split with exponents p0/p and (p0/p)'",
                    P, A ** theta * B ** (1 - theta))
    rec_t = audit.add_measured("a2", "transfer of T on L^p0(w (Mf)^(p-p0)) [measured]", A, A0)
    pos = fv > 0
    worst = float(np.max((fv[pos] / mf[pos]) ** (p0 - p))) if pos.any() else 0.0
    audit.add_exact("a3", "pointwise |f|^p0 (Mf)^(p-p0) <= |f|^p, as max (f/Mf)^(p0-p)",
                    worst, 1.0)
    rec_m = audit.add_measured("a4", "maximal bound on L^p(w) [measured]", B, F)
    bound = rec_t.ratio ** theta * rec_m.ratio ** (1 - theta)
    audit.add_exact("composite", "int|Tf|^p w / int|f|^p w <= K_T^(p/p0) K_M^(p(1-p/p0))",
                    P / F, bound)
    audit.add_measured("ratio", "||Tf||_Lp(w) / ||f||_Lp(w) [measured]",
                       P ** (1 / p), F ** (1 / p))
    return audit


def audit_part_b(T: OperatorPlugin, f: GridFunction, u: GridFunction, w: Weight | None,
                 p: float, p1: float | None, s: float, params: ContentParams,
                 p0: float | None = None) -> InequalityAudit:
    """Records b1..b5 (b5h: the Holder half of b5) and the composite check.

    ``u`` is rescaled to unit norm in ``L^q(w dC)``, ``q = (p/p1)'``.
    ``p1`` defaults to ``(1 + min(p, p0)) / 2``.
    """
    if p1 is None:
        p1 = (1 + (p if p0 is None else min(p, p0))) / 2
    if not 1 < p1 < p:
        raise ValueError(f"need 1 < p1 < p, got p1={p1}, p={p}")
    if p0 is not None and not p1 < p0:
        raise ValueError(f"need p1 < p0, got p1={p1}, p0={p0}")
    if not s > 1:
        raise ValueError(f"need s > 1, got {s}")
    q = conjugate(p / p1)
    if not q > s:
        raise ValueError(f"need (p/p1)' = {q:g} > s = {s:g} so that r = (p/p1)'/s > 1")
    if f.is_zero():
        raise ValueError("f must not vanish identically (norm ratio divides by zero)")
    spec = f.spec
    w = _ones(spec) if w is None else w
    wv = w.values
    u = normalize(u, NormParams(q, params, w))
    uv = u.values
    if not np.any(uv > 0):
        raise ValueError("u must not vanish identically")
    fv = np.abs(f.values)
    tf = np.abs(T(f).values)

    audit = InequalityAudit()
    lhs = _integral(spec, tf ** p * wv, params) ** (p1 / p)
    rhs = _integral(spec, (tf ** p1) ** (p / p1) * wv, params) ** (p1 / p)
    audit.add_equality("b1", "||Tf||_Lp(w)^p1 = || |Tf|^p1 ||_L(p/p1)(w)", lhs, rhs)

    r = q / s
    rp = conjugate(r)
    g = (uv * wv) ** s
    lhs = _integral(spec, g, params)
    rhs = (_integral(spec, uv ** q * wv, params) ** (1 / r)
           * _integral(spec, wv ** (1 + rp * (s - 1)), params) ** (1 / rp))
    audit.add_exact("b2", "Holder with r = (p/p1)'/s and r'", lhs, rhs)

    V = dyadic_maximal(GridFunction(spec, g), params).values ** (1 / s)
    uw = uv * wv
    pos = uw > 0
    audit.add_exact("b3", "pointwise uw <= (M((uw)^s))^(1/s), as max ratio",
                    float(np.max(uw[pos] / V[pos])), 1.0)

    C0 = _integral(spec, tf ** p1 * uv * wv, params)
    C1 = _integral(spec, tf ** p1 * V, params)
    B4 = _integral(spec, fv ** p1 * V, params)
    rec4 = audit.add_measured("b4", "part (A) with weight (M((uw)^s))^(1/s) [measured]", C1, B4)

    F = _integral(spec, fv ** p * wv, params)
    G = _integral(spec, V ** q * wv ** (1 - q), params)
    audit.add_exact("b5h", "Holder with exponents p/p1 and (p/p1)'",
                    B4, F ** (p1 / p) * G ** (1 / q))
    H = _integral(spec, g ** (q / s) * wv ** (1 - q), params)
    audit.add_measured("b5", "maximal bound against w^(1-(p/p1)') [measured]", G, H)

    audit.add_exact("composite", "int|Tf|^p1 uw <= K_b4 ||f||^p1 (int V^q w^(1-q))^(1/q)",
                    C0, rec4.ratio * F ** (p1 / p) * G ** (1 / q))
    audit.add_measured("total", "int|Tf|^p1 uw / ||f||_Lp(w)^p1 [measured]", C0, F ** (p1 / p))
    return audit


def suggest_s(power_gamma: float, q_min: float, q: float) -> float:
    """Common exponent s > 1 from the two weight-improvement searches.

    ``power_gamma`` is gamma with ``w^(1+gamma)`` in ``A_(p/p1)``; it admits
    every s with ``q (s-1)/(q-s) <= gamma``, i.e. ``s <= q(1+gamma)/(q+gamma)``.
    ``q_min`` is the smallest index with ``w^(1-q)`` in ``A_(q_min)``; it
    admits every ``s <= q / q_min``. Both admissible ranges are intervals
    starting at 1, so the common choice is the smaller endpoint.
    """
    s0 = q * (1 + power_gamma) / (q + power_gamma)
    s1 = q / q_min
    return min(s0, s1)


@dataclass(frozen=True)
class SweepRow:
    p: float
    p0: float
    L: int
    seed: int
    op: str
    weight: str
    ratio: float

    def csv_row(self) -> list[str]:
        return [format_number(self.p), format_number(self.p0), str(self.L), str(self.seed),
                self.op, self.weight, format_number(self.ratio)]


SWEEP_HEADER = ["p", "p0", "L", "seed", "op", "weight", "ratio"]


def make_weight(desc: str, spec: GridSpec, params: ContentParams, seed) -> Weight:
    """``one`` (w = 1) or ``a1:<delta>`` ((Mg)^delta for a seeded random g)."""
    if desc == "one":
        return _ones(spec)
    if desc.startswith("a1:"):
        try:
            delta = float(desc[3:])
        except ValueError:
            raise ValueError(f"bad weight spec {desc!r}; expected a1:<delta>") from None
        return construct_a1(sample_function(spec, seed), delta, params)
    raise ValueError(f"unknown weight spec {desc!r}; choose one or a1:<delta>")


def check_weight_spec(desc: str) -> None:
    if desc == "one":
        return
    if desc.startswith("a1:"):
        try:
            delta = float(desc[3:])
        except ValueError:
            raise ValueError(f"bad weight spec {desc!r}; expected a1:<delta>") from None
        if not 0 <= delta < 1:
            raise ValueError(f"weight spec {desc!r}: delta must lie in [0, 1)")
        return
    raise ValueError(f"unknown weight spec {desc!r}; choose one or a1:<delta>")


def operator_norm_sweep(T: OperatorPlugin, p_list, weight_specs, trials: int, seed: int,
                        params: ContentParams, specs, p0: float = 2.0) -> list[SweepRow]:
    """Ratios ``||Tf|| / ||f||`` in L^p(w dC) over seeded random f.

    Trial t at resolution L uses seed ``seed + t``: f is
    ``sample_function(spec, (seed + t, L, 0))`` and a random weight is
    built from ``sample_function(spec, (seed + t, L, 1))``. Rows are ordered
    by (p, weight, L, trial).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for desc in weight_specs:
        check_weight_spec(desc)
    rows = []
    for p in p_list:
        for desc in weight_specs:
            for spec in specs:
                for t in range(trials):
                    tseed = seed + t
                    f = sample_function(spec, (tseed, spec.L, 0))
                    w = make_weight(desc, spec, params, (tseed, spec.L, 1))
                    norm = NormParams(p, params, w)
                    ratio = lp_norm(T(f), norm) / lp_norm(f, norm)
                    rows.append(SweepRow(p, p0, spec.L, tseed, T.name, desc, ratio))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def max_ratio(rows, **match) -> float:
    vals = [r.ratio for r in rows if all(getattr(r, k) == v for k, v in match.items())]
    return max(vals) if vals else math.nan
