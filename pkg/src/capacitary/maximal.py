"""Dyadic capacitary maximal operator and its weak-type measurements.

``M f(x)`` is the largest capacitary average ``(1 / l(Q)**beta) int_Q f dC``
over the L + 1 dyadic cubes Q containing x. Averages come straight out of
:func:`capacitary.choquet.layer_cake`, which normalizes each layer before
summing; on a cell this gives ``f(x)`` exactly, hence ``Mf >= f`` with no
rounding slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .audit import InequalityAudit
from .choquet import choquet_integral, choquet_over_set, layer_cake, weighted_integral
from .content import dyadic_content, superlevel_contents
from .grid import (
    ContentParams,
    DyadicCube,
    DyadicSet,
    GridFunction,
    GridSpec,
    Weight,
    random_function,
)


def all_cube_integrals(f: GridFunction, params: ContentParams) -> dict[DyadicCube, float]:
    """``int_Q f dC`` for every dyadic cube Q of levels 0..L."""
    n = f.spec.n
    cake = layer_cake(f, params)
    out = {}
    for k, row in enumerate(cake.integrals):
        for m, v in enumerate(row.tolist()):
            out[DyadicCube.from_morton(m, n, k)] = v
    return out


def _broadcast_max(level_values: list[np.ndarray], spec: GridSpec) -> np.ndarray:
    """Per cell (Morton order), the max of per-cube values over its ancestors."""
    best = level_values[spec.L].copy()
    for k in range(spec.L):
        best = np.maximum(best, np.repeat(level_values[k], 1 << (spec.n * (spec.L - k))))
    return best


def dyadic_maximal(f: GridFunction, params: ContentParams) -> GridFunction:
    cake = layer_cake(f, params)
    return GridFunction.from_morton(f.spec, _broadcast_max(cake.averages, f.spec))


def level_average(f: GridFunction, level: int, params: ContentParams) -> GridFunction:
    """Capacitary average of f over each cell's level-``level`` ancestor."""
    spec = f.spec
    if not 0 <= level <= spec.L:
        raise ValueError(f"averaging level must lie in [0, {spec.L}], got {level}")
    avg = layer_cake(f, params).averages[level]
    return GridFunction.from_morton(spec, np.repeat(avg, 1 << (spec.n * (spec.L - level))))


def weak11_constant(f: GridFunction, w: Weight | None, params: ContentParams) -> float:
    """``sup_t t * w_C({Mf > t}) / ||f||_{L1(w dC)}``.

    On ``[v_{j+1}, v_j)`` the level set is ``{Mf >= v_j}``, so the supremum
    over that interval is the limit ``v_j * w_C({Mf >= v_j})`` as t rises to
    v_j. The result is the exact maximum of these plateau limits.
    """
    if f.is_zero():
        raise ValueError("weak-type constant undefined for f = 0")
    mf = dyadic_maximal(f, params)
    norm = weighted_integral(f, w, params)
    if w is None or np.all(w.values == 1.0):
        levels, caps = superlevel_contents(mf, params)
    else:
        levels = np.unique(mf.values)[::-1]
        levels = levels[levels > 0]
        caps = np.array([
            choquet_integral(GridFunction(f.spec, np.where(mf.values >= v, w.values, 0.0)), params)
            for v in levels
        ])
    return float(np.max(levels * caps) / norm)


def measured_weak11_constant(spec: GridSpec, params: ContentParams, trials: int, seed: int) -> float:
    """Largest unweighted weak (1,1) constant over ``trials`` seeded random
    functions, drawn as in :func:`sample_function`."""
    return max(
        weak11_constant(sample_function(spec, (seed, t)), None, params)
        for t in range(trials)
    )


def sample_function(spec: GridSpec, seed, sparsity: float | None = None) -> GridFunction:
    """Log-normal cell values, with a seeded fraction of cells zeroed.

    The zeros give the maximal function non-trivial level sets; the
    fraction is itself drawn from the seed unless given.
    """
    rng = np.random.default_rng(seed)
    if sparsity is None:
        sparsity = rng.uniform(0.0, 0.9)
    keep = rng.random(spec.cells) >= sparsity
    if not keep.any():
        keep[rng.integers(spec.cells)] = True
    base = random_function(spec, rng.integers(2**63))
    return GridFunction(spec, np.where(keep, base.values, 0.0))


def kolmogorov_audit(f: GridFunction, E: DyadicSet, gamma: float, K: float,
                     params: ContentParams) -> InequalityAudit:
    """``int_E (Mf)^gamma dC <= K^gamma / (1 - gamma) C(E)^(1-gamma) ||f||_1^gamma``."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if E.is_empty():
        raise ValueError("set E must be non-empty")
    mf = dyadic_maximal(f, params)
    lhs = choquet_over_set(GridFunction(f.spec, mf.values ** gamma), E, params)
    rhs = (K ** gamma / (1 - gamma)) * dyadic_content(E, params) ** (1 - gamma) \
        * choquet_integral(f, params) ** gamma
    audit = InequalityAudit()
    audit.add_exact("kolmogorov", f"gamma={gamma:g} K={K:.6g}", lhs, rhs)
    return audit


@dataclass(frozen=True)
class OperatorPlugin:
    name: str
    transform: Callable[[GridFunction], GridFunction]

    def __call__(self, f: GridFunction) -> GridFunction:
        return self.transform(f)


def make_operator(name: str, params: ContentParams) -> OperatorPlugin:
    """Resolve ``identity``, ``maximal`` or ``avg:k``."""
    if name == "identity":
        return OperatorPlugin(name, lambda f: f)
    if name == "maximal":
        return OperatorPlugin(name, lambda f: dyadic_maximal(f, params))
    if name.startswith("avg:"):
        try:
            level = int(name[4:])
        except ValueError:
            raise ValueError(f"bad averaging operator {name!r}; expected avg:<level>") from None
        if level < 0:
            raise ValueError(f"averaging level must be >= 0, got {level}")
        return OperatorPlugin(name, lambda f: level_average(f, level, params))
    raise ValueError(f"unknown operator {name!r}; choose identity, maximal or avg:<level>")
