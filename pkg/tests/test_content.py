import itertools

import numpy as np
import pytest

from capacitary.content import (
    cubic_content_1d,
    dyadic_content,
    dyadic_content_witness,
    exhaustive_dyadic_oracle,
    superlevel_contents,
    weighted_capacity,
    weighted_dyadic_content,
)
from capacitary.grid import (
    ContentParams,
    DyadicCube,
    DyadicSet,
    GridFunction,
    GridSpec,
    Weight,
    parse_dyadic_set,
    random_function,
    random_set,
)


def all_subsets(spec):
    for bits in itertools.product([False, True], repeat=spec.cells):
        yield DyadicSet(spec, np.array(bits))


def test_examples():
    half = ContentParams(0.5)
    assert dyadic_content(parse_dyadic_set("1 2\n1 1 1 1"), half) == 1.0
    assert dyadic_content(parse_dyadic_set("1 2\n1 1 0 0"), half) == pytest.approx(2 ** -0.5, abs=1e-15)
    assert dyadic_content(parse_dyadic_set("1 2\n1 0 0 1"), half) == 1.0
    assert dyadic_content(DyadicSet.empty(GridSpec(2, 3)), half) == 0.0


def test_witness_example():
    w = dyadic_content_witness(parse_dyadic_set("1 2\n1 1 0 0"), ContentParams(0.5))
    assert w.cubes == [DyadicCube(1, (0,))]
    assert w.cost == pytest.approx(2 ** -0.5)


@pytest.mark.parametrize("n,L", [(1, 3), (2, 2)])
@pytest.mark.parametrize("beta", [0.3, 0.5, 1.0])
def test_matches_exhaustive_oracle(n, L, beta):
    spec = GridSpec(n, L)
    params = ContentParams(beta)
    subsets = all_subsets(spec) if spec.cells <= 8 else (
        random_set(spec, d, s) for s in range(15) for d in (0.2, 0.5))
    for E in subsets:
        assert abs(dyadic_content(E, params) - exhaustive_dyadic_oracle(E, params)) <= 1e-14


def test_oracle_rejects_large():
    with pytest.raises(ValueError, match="too large"):
        exhaustive_dyadic_oracle(DyadicSet.full(GridSpec(1, 4)), ContentParams(0.5))


@pytest.mark.parametrize("n,L", [(1, 6), (2, 3)])
def test_witness_is_cover_with_stated_cost(n, L):
    spec = GridSpec(n, L)
    params = ContentParams(0.7)
    for seed in range(50):
        E = random_set(spec, 0.3, seed)
        wit = dyadic_content_witness(E, params)
        covered = DyadicSet.empty(spec)
        for q in wit.cubes:
            covered = covered | DyadicSet.from_cube(spec, q)
        assert E <= covered
        assert sum(q.side ** 0.7 for q in wit.cubes) == pytest.approx(wit.cost, rel=1e-12)
        assert wit.cost == pytest.approx(dyadic_content(E, params), rel=1e-15)


def test_cubic_examples():
    half = ContentParams(0.5)
    assert cubic_content_1d(parse_dyadic_set("1 2\n1 1 0 0"), half) == pytest.approx(2 ** -0.5)
    assert cubic_content_1d(parse_dyadic_set("1 2\n1 0 0 1"), half) == pytest.approx(1.0)


def test_cubic_beats_dyadic_within_factor():
    spec = GridSpec(1, 5)
    for beta in (0.3, 0.5, 1.0):
        params = ContentParams(beta)
        for seed in range(100):
            E = random_set(spec, 0.4, seed)
            if E.is_empty():
                continue
            c, d = cubic_content_1d(E, params), dyadic_content(E, params)
            assert c <= d
            assert d / c <= 2 ** (1 + beta)


def test_cubic_needs_1d():
    with pytest.raises(ValueError):
        cubic_content_1d(DyadicSet.full(GridSpec(2, 1)), ContentParams(0.5))


def test_monotone_and_normalized():
    params = ContentParams(0.6)
    for spec in (GridSpec(1, 7), GridSpec(2, 3)):
        assert dyadic_content(DyadicSet.full(spec), params) == 1.0
        for seed in range(100):
            A = random_set(spec, 0.3, seed)
            B = A | random_set(spec, 0.2, seed + 1000)
            assert dyadic_content(A, params) <= dyadic_content(B, params)


def test_single_cell_costs_its_side():
    spec = GridSpec(2, 3)
    E = DyadicSet.from_cells(spec, [5])
    assert dyadic_content(E, ContentParams(1.5)) == pytest.approx(0.125 ** 1.5)


@pytest.mark.parametrize("n,L", [(1, 8), (2, 4)])
def test_strong_subadditivity(n, L):
    spec = GridSpec(n, L)
    params = ContentParams(0.5 * n)
    C = lambda S: dyadic_content(S, params)  # noqa: E731
    for seed in range(200):
        A, B = random_set(spec, 0.3, 2 * seed), random_set(spec, 0.3, 2 * seed + 1)
        assert C(A | B) + C(A & B) <= C(A) + C(B) + 1e-12


def test_finite_subadditivity():
    spec = GridSpec(1, 6)
    params = ContentParams(0.4)
    for seed in range(50):
        parts = [random_set(spec, 0.1, seed * 10 + j) for j in range(4)]
        union = parts[0] | parts[1] | parts[2] | parts[3]
        assert dyadic_content(union, params) <= sum(dyadic_content(P, params) for P in parts) + 1e-12


def test_weighted_content_examples():
    E = parse_dyadic_set("1 2\n1 1 0 0")
    ones = Weight(E.spec, np.ones(4))
    assert weighted_dyadic_content(E, ContentParams(0.5), ones) == pytest.approx(2 ** -0.5)
    assert weighted_dyadic_content(E, ContentParams(0.5), ones) == dyadic_content(E, ContentParams(0.5))


def test_weighted_content_scales_and_dominates():
    spec = GridSpec(1, 6)
    params = ContentParams(0.5)
    for seed in range(30):
        E = random_set(spec, 0.4, seed)
        w = Weight.of(random_function(spec, seed))
        base = weighted_dyadic_content(E, params, w)
        assert weighted_dyadic_content(E, params, Weight(spec, 3 * w.values)) == pytest.approx(3 * base)
        lo = float(w.values.min())
        assert base >= lo * dyadic_content(E, params) * (1 - 1e-12)


def test_weighted_capacity_is_choquet_of_indicator():
    spec = GridSpec(1, 4)
    E = random_set(spec, 0.5, 3)
    params = ContentParams(0.5)
    ones = GridFunction(spec, np.ones(spec.cells))
    assert weighted_capacity(E, ones, params) == pytest.approx(dyadic_content(E, params), rel=1e-15)


@pytest.mark.parametrize("n,L", [(1, 7), (2, 3)])
def test_superlevel_contents_match_batch(n, L):
    spec = GridSpec(n, L)
    params = ContentParams(0.8)
    for seed in range(20):
        vals = np.round(random_function(spec, seed).values, 1)
        vals[::3] = 0.0
        f = GridFunction(spec, vals)
        t, c = superlevel_contents(f, params)
        expected_t = np.unique(vals[vals > 0])[::-1]
        assert list(t) == list(expected_t)
        for tj, cj in zip(t, c):
            assert cj == dyadic_content(DyadicSet(spec, vals >= tj), params)
