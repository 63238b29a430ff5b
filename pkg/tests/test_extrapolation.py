import csv
import io
import math

import numpy as np
import pytest

from capacitary.choquet import NormParams, choquet_integral, duality_extremal, lp_norm
from capacitary.extrapolation import (
    SWEEP_HEADER,
    audit_part_a,
    audit_part_b,
    build_rdf_weight,
    check_weight_spec,
    make_weight,
    max_ratio,
    operator_norm_sweep,
    suggest_s,
    sweep_csv,
)
from capacitary.grid import ContentParams, GridFunction, GridSpec, Weight
from capacitary.maximal import make_operator, sample_function
from capacitary.weights import construct_a1

HALF = ContentParams(0.5)


def chi(spec):
    return GridFunction(spec, np.ones(spec.cells))


def test_rdf_weight_of_constant():
    spec = GridSpec(1, 4)
    r = build_rdf_weight(chi(spec), Weight(spec, np.ones(spec.cells)), 1.5, 2.0, HALF)
    assert r.weight.values == pytest.approx(1.0)
    assert r.audit.exact_ok


def test_rdf_weight_factorizes():
    spec = GridSpec(1, 6)
    f = sample_function(spec, 1)
    w = construct_a1(sample_function(spec, 2), 0.5, HALF)
    r = build_rdf_weight(f, w, 1.5, 2.0, HALF)
    assert r.audit.exact_ok
    assert r.weight.values == pytest.approx(w.values * r.factor.values ** (1 - 2.0), rel=1e-12)


def test_part_a_identity():
    spec = GridSpec(1, 5)
    T = make_operator("identity", HALF)
    audit = audit_part_a(T, sample_function(spec, 0), None, 1.5, 2.0, HALF)
    assert audit.exact_ok
    assert audit["a2"].ratio == 1.0
    assert audit["ratio"].ratio == 1.0


def test_part_a_constant_input():
    spec = GridSpec(1, 4)
    T = make_operator("maximal", HALF)
    audit = audit_part_a(T, chi(spec), None, 1.5, 2.0, HALF)
    assert audit.exact_ok
    assert audit["a1"].lhs == pytest.approx(audit["a1"].rhs, rel=1e-12)
    assert audit["ratio"].ratio == pytest.approx(1.0)


def test_part_a_random():
    T = make_operator("maximal", HALF)
    for seed in range(30):
        spec = GridSpec(1, 6)
        f = sample_function(spec, (seed, 0))
        w = construct_a1(sample_function(spec, (seed, 1)), 0.5, HALF)
        audit = audit_part_a(T, f, w, 1.5, 2.0, HALF)
        assert audit.exact_ok, audit.to_csv()
        assert all(math.isfinite(audit[k].ratio) for k in ("a2", "a4", "ratio"))


def test_part_a_validation():
    spec = GridSpec(1, 2)
    T = make_operator("maximal", HALF)
    with pytest.raises(ValueError):
        audit_part_a(T, chi(spec), None, 2.0, 2.0, HALF)
    with pytest.raises(ValueError):
        audit_part_a(T, GridFunction(spec, np.zeros(4)), None, 1.5, 2.0, HALF)


def test_part_b_collapses_on_extremal():
    spec = GridSpec(1, 5)
    p, p1 = 2.0, 1.25
    T = make_operator("identity", HALF)
    f = sample_function(spec, 3)
    power = GridFunction(spec, f.values ** p1)
    u = duality_extremal(power, NormParams(p / p1, HALF))
    audit = audit_part_b(T, f, u, None, p, p1, 1.25, HALF)
    assert audit.exact_ok, audit.to_csv()
    assert audit["total"].ratio == pytest.approx(1.0, rel=1e-10)


def test_part_b_constant_data():
    spec = GridSpec(1, 3)
    T = make_operator("maximal", HALF)
    audit = audit_part_b(T, chi(spec), chi(spec), None, 2.0, 1.25, 1.25, HALF)
    assert audit.exact_ok
    # all cells equal: every integral is the content of the unit cube
    assert audit["b3"].lhs == pytest.approx(1.0)
    assert audit["total"].ratio == pytest.approx(1.0)


@pytest.mark.parametrize("weighted", [False, True])
def test_part_b_random(weighted):
    T = make_operator("maximal", HALF)
    spec = GridSpec(1, 6)
    for seed in range(30):
        f = sample_function(spec, (seed, 0))
        u = sample_function(spec, (seed, 1))
        w = construct_a1(sample_function(spec, (seed, 2)), 0.5, HALF) if weighted else None
        audit = audit_part_b(T, f, u, w, 2.0, 1.25, 1.25, HALF)
        assert audit.exact_ok, audit.to_csv()


def test_part_b_validation():
    spec = GridSpec(1, 2)
    T = make_operator("identity", HALF)
    f = chi(spec)
    with pytest.raises(ValueError, match="p1"):
        audit_part_b(T, f, f, None, 2.0, 2.5, 1.25, HALF)
    with pytest.raises(ValueError, match="s"):
        audit_part_b(T, f, f, None, 2.0, 1.25, 1.0, HALF)
    with pytest.raises(ValueError):
        audit_part_b(T, f, f, None, 2.0, 1.25, 3.0, HALF)


def test_suggest_s_takes_smaller_endpoint():
    q = 2.6666666666666665
    assert suggest_s(0.0, 1.0, q) == 1.0
    s = suggest_s(0.5, 2.0, q)
    assert s == min(q * 1.5 / (q + 0.5), q / 2.0)
    assert 1 < s < q


def test_sweep_identity_ratios_are_one():
    specs = [GridSpec(1, 4), GridSpec(1, 5)]
    rows = operator_norm_sweep(make_operator("identity", HALF), [1.5, 2.0], ["one", "a1:0.5"],
                               3, 7, HALF, specs)
    assert len(rows) == 2 * 2 * 2 * 3
    assert all(r.ratio == pytest.approx(1.0, rel=1e-14) for r in rows)
    assert [(r.p, r.weight, r.L) for r in rows[:4]] == [(1.5, "one", 4)] * 3 + [(1.5, "one", 5)]


def test_sweep_global_average_contracts():
    spec = GridSpec(1, 5)
    T = make_operator("avg:0", HALF)
    rows = operator_norm_sweep(T, [1.0, 2.0, 3.0], ["one"], 10, 0, HALF, [spec])
    for r in rows:
        f = sample_function(spec, (r.seed, r.L, 0))
        c = choquet_integral(f, HALF)
        direct = c / lp_norm(f, NormParams(r.p, HALF))
        assert r.ratio == pytest.approx(direct, rel=1e-12)
        assert r.ratio <= 1 + 1e-12


def test_sweep_csv_deterministic():
    specs = [GridSpec(1, 4)]
    T = make_operator("maximal", HALF)
    a = sweep_csv(operator_norm_sweep(T, [2.0], ["one"], 4, 3, HALF, specs))
    b = sweep_csv(operator_norm_sweep(T, [2.0], ["one"], 4, 3, HALF, specs))
    assert a == b
    table = list(csv.reader(io.StringIO(a)))
    assert table[0] == SWEEP_HEADER
    assert len(table) == 5
    rows = operator_norm_sweep(T, [2.0], ["one"], 4, 3, HALF, specs)
    assert max_ratio(rows, L=4) == max(r.ratio for r in rows)
    assert math.isnan(max_ratio(rows, L=9))


def test_weight_specs():
    spec = GridSpec(1, 3)
    assert make_weight("one", spec, HALF, 0).values.tolist() == [1.0] * 8
    assert make_weight("a1:0.5", spec, HALF, 0) == make_weight("a1:0.5", spec, HALF, 0)
    for bad in ("two", "a1:x", "a1:1.5"):
        with pytest.raises(ValueError):
            check_weight_spec(bad)
    with pytest.raises(ValueError):
        operator_norm_sweep(make_operator("identity", HALF), [2.0], ["one"], 0, 0, HALF, [spec])
