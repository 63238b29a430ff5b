"""Capacitary Muckenhoupt constants on the dyadic grid.

A finite grid puts every positive weight in every class with some finite
constant, so the quantities of interest are the constants themselves:
per-cube A_p values, their supremum, the A_1 ratio ``Mw / w``, and how
they move under powers, duals and products. Quasi-continuity hypotheses
are vacuous for step functions and are not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audit import InequalityAudit
from .choquet import conjugate, layer_cake
from .grid import ContentParams, DyadicCube, GridFunction, Weight
from .maximal import dyadic_maximal


@dataclass
class ApReport:
    p: float
    beta: float
    constant: float
    witness_cube: DyadicCube
    per_level: list[np.ndarray]

    @property
    def per_cube(self) -> dict[DyadicCube, float]:
        n = self.witness_cube.n
        return {
            DyadicCube.from_morton(m, n, k): v
            for k, row in enumerate(self.per_level)
            for m, v in enumerate(row.tolist())
        }


def _as_weight(w) -> Weight:
    return Weight.of(w)


def per_cube_ap(w: Weight, p: float, params: ContentParams) -> list[np.ndarray]:
    """``avg_Q(w) * avg_Q(w^(-1/(p-1)))^(p-1)`` for every cube, by level."""
    if not p > 1:
        raise ValueError(f"A_p constant needs p > 1, got {p}")
    w = _as_weight(w)
    avg_w = layer_cake(w, params).averages
    sigma = GridFunction(w.spec, w.values ** (-1.0 / (p - 1)))
    avg_s = layer_cake(sigma, params).averages
    return [a * b ** (p - 1) for a, b in zip(avg_w, avg_s)]


def ap_constant(w: Weight, p: float, params: ContentParams) -> ApReport:
    levels = per_cube_ap(w, p, params)
    best, where = -math.inf, (0, 0)
    for k, row in enumerate(levels):
        m = int(np.argmax(row))
        if row[m] > best:
            best, where = float(row[m]), (k, m)
    cube = DyadicCube.from_morton(where[1], w.spec.n, where[0])
    return ApReport(p, params.beta, best, cube, levels)


def a1_constant(w: Weight, params: ContentParams) -> float:
    """``max_x Mw(x) / w(x)``; at least 1 because Mw >= w."""
    w = _as_weight(w)
    return float(np.max(dyadic_maximal(w, params).values / w.values))


def class_constant(w: Weight, p: float, params: ContentParams) -> float:
    """A_1 constant for p = 1, A_p constant otherwise."""
    return a1_constant(w, params) if p == 1 else ap_constant(w, p, params).constant


def dual_weight(w: Weight, p: float) -> Weight:
    """``w^(1 - p')``, the A_p' partner of an A_p weight."""
    if not p > 1:
        raise ValueError(f"dual weight needs p > 1, got {p}")
    return Weight(w.spec, w.values ** (1 - conjugate(p)))


def construct_a1(f: GridFunction, delta: float, params: ContentParams) -> Weight:
    """``(Mf)^delta``, an A_1 weight for 0 <= delta < 1."""
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    if f.is_zero():
        raise ValueError("f must not vanish identically")
    if delta == 0:
        return Weight(f.spec, np.ones(f.spec.cells))
    return Weight(f.spec, dyadic_maximal(f, params).values ** delta)


def jones_compose(w0: Weight, w1: Weight, p: float,
                  params: ContentParams) -> tuple[Weight, InequalityAudit]:
    """``w = w0 * w1^(1-p)`` with the check ``[w]_p <= [w0]_1 [w1]_1^(p-1)``."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    w0, w1 = _as_weight(w0), _as_weight(w1)
    w = Weight(w0.spec, w0.values * w1.values ** (1 - p))
    lhs = class_constant(w, p, params)
    rhs = a1_constant(w0, params) * a1_constant(w1, params) ** (p - 1)
    audit = InequalityAudit()
    audit.add_exact("jones", f"[w0 w1^(1-p)]_A{p:g} <= [w0]_A1 [w1]_A1^(p-1)", lhs, rhs,
                    rtol=1e-9, atol=0.0)
    return w, audit


def power_improvement_search(w: Weight, p: float, params: ContentParams, cap: float,
                             resolution: float = 1e-3, upper: float = 4.0) -> float:
    """Largest gamma on the grid ``resolution * (1 .. upper/resolution)`` with
    ``[w^(1+gamma)]_p <= cap``, found by bisection; 0 when none qualifies.

    Bisection presumes the constant grows with gamma, which holds for the
    weights this is used on; the returned gamma always passed the check.
    """
    w = _as_weight(w)
    steps = int(round(upper / resolution))

    def ok(i):
        return i == 0 or class_constant(Weight(w.spec, w.values ** (1 + i * resolution)),
                                        p, params) <= cap

    if ok(steps):
        return steps * resolution
    lo, hi = 0, steps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo * resolution


def self_improvement_search(w: Weight, p: float, params: ContentParams, cap: float,
                            resolution: float = 1e-3) -> float:
    """Smallest q on the grid ``1 + resolution * k`` inside (1, p) with
    ``[w]_q <= cap``, by bisection; p itself when none qualifies."""
    if not p > 1:
        raise ValueError(f"p must be > 1, got {p}")
    w = _as_weight(w)
    top = math.ceil((p - 1) / resolution - 1e-9) - 1  # largest k with 1 + k*res < p
    if top < 1:
        return p

    def ok(k):
        return ap_constant(w, 1 + k * resolution, params).constant <= cap

    if not ok(top):
        return p
    lo, hi = 0, top  # invariant: hi qualifies, lo does not (or is the open end)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 1 + hi * resolution
