"""Choquet integration against the dyadic Hausdorff content.

For a step function the layer-cake integral is a finite sum,

    int f dC = sum_j (t_j - t_{j+1}) C({f >= t_j}),

over the distinct positive values t_1 > ... > t_m (t_{m+1} = 0).

:func:`layer_cake` evaluates this simultaneously for every dyadic cube Q,
restricted to Q: cells are inserted into the cover tree in decreasing order
of f, and each node integrates its own cost, which is the content of the
current superlevel set inside that node, lazily over the threshold axis.
The content of ``E & Q`` is exactly the cost of node Q (any ancestor of Q
is dearer than Q itself), so all 2^(nL+1) cube integrals come out of one
O(N L) sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audit import InequalityAudit
from .grid import ContentParams, DyadicSet, GridFunction, Weight, side_powers


@dataclass(frozen=True)
class NormParams:
    p: float
    content: ContentParams
    weight: Weight | None = None

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"exponent p must be >= 1, got {self.p}")

    @property
    def conjugate(self) -> float:
        return conjugate(self.p)


def conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True)
class LayerCake:
    """Per-level arrays in Morton order: ``integrals[k][m]`` is the Choquet
    integral of f over the m-th level-k cube, ``averages[k][m]`` the same
    divided by ``l(Q)**beta``."""

    integrals: list[np.ndarray]
    averages: list[np.ndarray]


def layer_cake(f: GridFunction, params: ContentParams) -> LayerCake:
    spec = f.spec
    params.check(spec)
    n, L, fan = spec.n, spec.L, spec.fanout
    pows = side_powers(L, params.beta)
    vals = f.morton()
    order = np.argsort(-vals, kind="stable").tolist()
    vals_l = vals.tolist()

    sizes = [1 << (n * k) for k in range(L + 1)]
    cost = [[0.0] * s for s in sizes]
    since = [[0.0] * s for s in sizes]  # threshold at which the current cost began
    acc = [[0.0] * s for s in sizes]
    accn = [[0.0] * s for s in sizes]

    leaf_cost, leaf_since = cost[L], since[L]
    for idx in order:
        t = vals_l[idx]
        if t <= 0:
            break
        leaf_cost[idx] = pows[L]
        leaf_since[idx] = t
        m, k = idx, L
        while k:
            m >>= n
            k -= 1
            ch = cost[k + 1]
            b = m << n
            s = ch[b]
            for c in range(1, fan):
                s = s + ch[b + c]
            pk = pows[k]
            new = pk if pk <= s else s
            row = cost[k]
            old = row[m]
            if new == old:
                break
            if old:
                dt = since[k][m] - t
                acc[k][m] += old * dt
                accn[k][m] += (old / pk) * dt
            row[m] = new
            since[k][m] = t

    integrals, averages = [], []
    for k in range(L + 1):
        c = np.array(cost[k])
        tail = np.array(since[k])
        integrals.append(np.array(acc[k]) + c * tail)
        averages.append(np.array(accn[k]) + (c / pows[k]) * tail)
    return LayerCake(integrals, averages)


def choquet_integral(f: GridFunction, params: ContentParams) -> float:
    """Layer-cake integral of a non-negative step function."""
    return float(layer_cake(f, params).integrals[0][0])


def choquet_over_set(f: GridFunction, E: DyadicSet, params: ContentParams) -> float:
    if f.spec != E.spec:
        raise ValueError("function and set live on different grids")
    return choquet_integral(GridFunction(f.spec, np.where(E.mask, f.values, 0.0)), params)


def _product(f: GridFunction, *others: np.ndarray) -> GridFunction:
    v = f.values
    for o in others:
        v = v * o
    return GridFunction(f.spec, v)


def _weight_values(f: GridFunction, weight: Weight | None) -> np.ndarray:
    if weight is None:
        return np.ones(f.spec.cells)
    if weight.spec != f.spec:
        raise ValueError("function and weight live on different grids")
    return weight.values


def weighted_integral(f: GridFunction, w: Weight | None, params: ContentParams) -> float:
    """``int f w dC``, the Choquet integral of the pointwise product."""
    if w is None:
        return choquet_integral(f, params)
    return choquet_integral(_product(f, _weight_values(f, w)), params)


def lp_norm(f: GridFunction, params: NormParams) -> float:
    """``(int f^p w dC)^(1/p)``; for p = inf the largest cell value."""
    if math.isinf(params.p):
        return float(f.values.max())
    g = GridFunction(f.spec, f.values ** params.p)
    return weighted_integral(g, params.weight, params.content) ** (1.0 / params.p)


def holder_audit(f: GridFunction, g: GridFunction, p: float, params: ContentParams) -> InequalityAudit:
    """``int fg dC <= ||f||_p ||g||_p'`` for one pair."""
    pp = conjugate(p)
    lhs = choquet_integral(_product(f, g.values), params)
    rhs = lp_norm(f, NormParams(p, params)) * lp_norm(g, NormParams(pp, params))
    audit = InequalityAudit()
    audit.add_exact("holder", f"Holder p={p:g}", lhs, rhs, rtol=1e-12, atol=0.0)
    return audit


def duality_extremal(f: GridFunction, params: NormParams) -> GridFunction:
    """``u = (f / ||f||)^(p-1)``: unit norm in L^p'(w dC), pairs to ||f||."""
    if math.isinf(params.p) or params.p <= 1:
        raise ValueError("duality extremal needs 1 < p < inf")
    if f.is_zero():
        raise ValueError("extremal undefined for f = 0")
    norm = lp_norm(f, params)
    return GridFunction(f.spec, (f.values / norm) ** (params.p - 1))


def normalize(u: GridFunction, params: NormParams) -> GridFunction:
    """Rescale to unit norm in L^p(w dC); zero stays zero."""
    norm = lp_norm(u, params)
    if norm == 0:
        return u
    return GridFunction(u.spec, u.values / norm)


def duality_audit(f: GridFunction, params: NormParams, candidates) -> InequalityAudit:
    """Pairings of f against unit-normalized candidates never exceed the
    norm of f, and the extremal attains it."""
    dual = NormParams(conjugate(params.p), params.content, params.weight)
    w = _weight_values(f, params.weight)
    norm = lp_norm(f, params)
    audit = InequalityAudit()
    for i, u in enumerate(candidates):
        u = normalize(u, dual)
        pairing = choquet_integral(_product(f, u.values, w), params.content)
        audit.add_exact(f"dual{i}", "pairing <= norm", pairing, norm)
    if not f.is_zero():
        u = duality_extremal(f, params)
        audit.add_equality("extremal_norm", "||u||_p' = 1", lp_norm(u, dual), 1.0)
        pairing = choquet_integral(_product(f, u.values, w), params.content)
        audit.add_equality("extremal", "extremal pairing = norm", pairing, norm)
    return audit
