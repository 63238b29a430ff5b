"""Dyadic Hausdorff content of unions of grid cells.

The content of E is the cheapest cover of E by dyadic cubes of Q0, cube Q
costing ``l(Q)**beta``. Covers finer than the grid never help when
``beta <= n`` (splitting a cube multiplies its cost by ``2**(n - beta)``), so
the bottom-up recurrence

    cost(Q) = 0                                  if Q does not meet E
    cost(Q) = min(l(Q)**beta, sum of child costs) otherwise

over the level-L tree is exact. Everything below is built on that recurrence
or, for the oracles, on brute force independent of it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .choquet import choquet_integral
from .grid import (
    ContentParams,
    DyadicCube,
    DyadicSet,
    GridFunction,
    GridSpec,
    Weight,
    child_sum,
    format_number,
    side_powers,
)


@dataclass(frozen=True)
class CoverWitness:
    """A disjoint dyadic cover attaining the content."""

    cubes: list[DyadicCube]
    cost: float
    terms: list[float]

    def lines(self) -> list[str]:
        """One ``"k i1 ... in cost"`` line per cube, cost being that cube's term."""
        return [f"{q} {format_number(c)}" for q, c in zip(self.cubes, self.terms)]


def _cost_tree(leaf_cost: np.ndarray, cube_cost: list, spec: GridSpec) -> list[np.ndarray]:
    """Run the cover recurrence. ``leaf_cost`` is in Morton order, zero off
    the set; ``cube_cost[k]`` is the single-cube price at level k (scalar or
    per-cube array)."""
    levels = [None] * (spec.L + 1)
    levels[spec.L] = leaf_cost
    for k in range(spec.L - 1, -1, -1):
        s = child_sum(levels[k + 1], spec.fanout)
        levels[k] = np.minimum(cube_cost[k], s)
    return levels


def _unweighted_levels(E: DyadicSet, params: ContentParams) -> list[np.ndarray]:
    params.check(E.spec)
    pows = side_powers(E.spec.L, params.beta)
    leaf = np.where(E.morton(), pows[-1], 0.0)
    return _cost_tree(leaf, pows, E.spec)


def dyadic_content(E: DyadicSet, params: ContentParams) -> float:
    """Exact dyadic Hausdorff content of a union of cells."""
    return float(_unweighted_levels(E, params)[0][0])


def dyadic_content_witness(E: DyadicSet, params: ContentParams) -> CoverWitness:
    """An optimal antichain cover; ties go to the parent cube."""
    spec = E.spec
    levels = _unweighted_levels(E, params)
    pows = side_powers(spec.L, params.beta)
    fan = spec.fanout
    cubes, costs = [], []
    stack = [(0, 0)]
    while stack:
        k, m = stack.pop()
        if levels[k][m] == 0:
            continue
        if k == spec.L:
            take = True
        else:
            kids = levels[k + 1][m * fan:(m + 1) * fan]
            s = kids[0]
            for c in kids[1:]:
                s = s + c
            take = pows[k] <= s
        if take:
            cubes.append(DyadicCube.from_morton(m, spec.n, k))
            costs.append(pows[k])
        else:
            stack.extend((k + 1, m * fan + c) for c in reversed(range(fan)))
    return CoverWitness(cubes, float(levels[0][0]), costs)


def exhaustive_dyadic_oracle(E: DyadicSet, params: ContentParams) -> float:
    """Minimum cost over every antichain of dyadic cubes covering E.

    Brute force, independent of the recurrence: all covering antichains are
    listed explicitly and priced. Only for n=1, L<=3 or n=2, L<=2.
    """
    spec = E.spec
    if not ((spec.n == 1 and spec.L <= 3) or (spec.n == 2 and spec.L <= 2)):
        raise ValueError("instance too large for exhaustive enumeration")
    params.check(spec)
    member = E.morton()
    fan = spec.fanout

    def block_empty(k, m):
        size = 1 << (spec.n * (spec.L - k))
        return not member[m * size:(m + 1) * size].any()

    def covers(k, m):
        out = []
        if block_empty(k, m):
            out.append(())
        out.append(((k, m),))
        if k < spec.L:
            per_child = [covers(k + 1, m * fan + c) for c in range(fan)]
            for combo in itertools.product(*per_child):
                out.append(tuple(itertools.chain.from_iterable(combo)))
        return out

    best = math.inf
    for cover in covers(0, 0):
        cost = 0.0
        for k, _ in cover:
            cost += 2.0 ** (-k * params.beta)
        best = min(best, cost)
    return best


def _interval_cost(n_cells: int, L: int, beta: float) -> float:
    # log2 is exact for powers of two, so dyadic-length intervals price
    # identically to side_powers().
    return 2.0 ** (beta * (math.log2(n_cells) - L))


def cubic_content_1d(E: DyadicSet, params: ContentParams) -> float:
    """Exact cubic content in 1D: covers by arbitrary intervals.

    An optimal cover groups the member cells into runs that are consecutive
    in sorted order and spans each run by its grid-aligned hull, so
    ``best[j] = min_i best[i] + hull(c_i .. c_{j-1})**beta``.
    """
    spec = E.spec
    if spec.n != 1:
        raise ValueError("cubic_content_1d requires n = 1")
    params.check(spec)
    cells = E.cells()
    m = cells.size
    if m == 0:
        return 0.0
    L, beta = spec.L, params.beta
    # price of a hull spanning h cells, h = 1 .. 2**L
    price = np.array([0.0] + [_interval_cost(h, L, beta) for h in range(1, (1 << L) + 1)])
    best = np.zeros(m + 1)
    for j in range(1, m + 1):
        spans = cells[j - 1] - cells[:j] + 1
        best[j] = np.min(best[:j] + price[spans])
    return float(best[m])


def _mean_weight_levels(w: Weight) -> list[np.ndarray]:
    spec = w.spec
    wm = w.morton()
    means = []
    for k in range(spec.L + 1):
        blocks = wm.reshape(1 << (spec.n * k), -1)
        means.append(blocks.sum(axis=1) / blocks.shape[1])
    return means


def weighted_dyadic_content(E: DyadicSet, params: ContentParams, w: Weight) -> float:
    """Cover content with cube Q priced ``(omega(Q) / |Q|) * l(Q)**beta``,
    omega(Q) the Lebesgue integral of w over Q."""
    if not isinstance(w, Weight):
        w = Weight.of(w)
    if w.spec != E.spec:
        raise ValueError("set and weight live on different grids")
    params.check(E.spec)
    pows = side_powers(E.spec.L, params.beta)
    means = _mean_weight_levels(w)
    cube_cost = [means[k] * pows[k] for k in range(E.spec.L + 1)]
    leaf = np.where(E.morton(), cube_cost[-1], 0.0)
    return float(_cost_tree(leaf, cube_cost, E.spec)[0][0])


def weighted_capacity(E: DyadicSet, w: GridFunction, params: ContentParams) -> float:
    """Choquet integral of ``w * 1_E`` against the dyadic content."""
    if w.spec != E.spec:
        raise ValueError("set and weight live on different grids")
    return choquet_integral(GridFunction(E.spec, np.where(E.mask, w.values, 0.0)), params)


def superlevel_contents(f: GridFunction, params: ContentParams) -> tuple[np.ndarray, np.ndarray]:
    """Distinct positive values t_1 > ... > t_m of f and C({f >= t_j}).

    Cells are inserted in decreasing order and only the path to the root is
    re-priced, so the whole nested family costs O(N L). Arithmetic matches
    the batch recurrence exactly.
    """
    spec = f.spec
    params.check(spec)
    n, L, fan = spec.n, spec.L, spec.fanout
    pows = side_powers(L, params.beta)
    vals = f.morton()
    order = np.argsort(-vals, kind="stable")
    cost = [[0.0] * (1 << (n * k)) for k in range(L + 1)]
    thresholds, contents = [], []
    vals_l = vals.tolist()
    for idx in order.tolist():
        t = vals_l[idx]
        if t <= 0:
            break
        if thresholds and t != thresholds[-1]:
            contents.append(cost[0][0])
        if not thresholds or t != thresholds[-1]:
            thresholds.append(t)
        m, k = idx, L
        cost[L][m] = pows[L]
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
            if cost[k][m] == new:
                break
            cost[k][m] = new
    if thresholds:
        contents.append(cost[0][0])
    return np.array(thresholds), np.array(contents)
