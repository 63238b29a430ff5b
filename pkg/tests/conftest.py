"""Independent reference computations shared by the test modules.

These take the slow, literal route: one full tree DP per threshold, one
layer cake per cube, geometric ancestor chains. None of them touch the
incremental kernel in ``capacitary.choquet.layer_cake``.
"""

import numpy as np
import pytest

from capacitary.content import dyadic_content
from capacitary.grid import DyadicSet, GridFunction, GridSpec, ancestors


def direct_choquet(f: GridFunction, params) -> float:
    """sum_j (t_j - t_{j+1}) C({f >= t_j}), each content a fresh DP."""
    t = np.unique(f.values[f.values > 0])[::-1]
    total = 0.0
    for j, tj in enumerate(t):
        nxt = t[j + 1] if j + 1 < len(t) else 0.0
        total += (tj - nxt) * dyadic_content(DyadicSet(f.spec, f.values >= tj), params)
    return total


def cube_mask(spec: GridSpec, cube) -> np.ndarray:
    """Membership of every cell in ``cube`` by coordinates, not Morton order."""
    mask = np.zeros(spec.cells, dtype=bool)
    shift = spec.L - cube.level
    for cell in range(spec.cells):
        leaf = ancestors(cell, spec)[0]
        mask[cell] = all((i >> shift) == j for i, j in zip(leaf.index, cube.index))
    return mask


def direct_maximal(f: GridFunction, params) -> np.ndarray:
    spec = f.spec
    cache = {}
    out = np.zeros(spec.cells)
    for cell in range(spec.cells):
        best = 0.0
        for q in ancestors(cell, spec):
            if q not in cache:
                g = GridFunction(spec, np.where(cube_mask(spec, q), f.values, 0.0))
                cache[q] = direct_choquet(g, params) / 2.0 ** (-q.level * params.beta)
            best = max(best, cache[q])
        out[cell] = best
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
