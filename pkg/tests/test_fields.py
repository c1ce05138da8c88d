"""Coefficient field containers, boundary data validation, integration."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from membrana.fields import (
    BoundaryCondition,
    CoefField,
    PairField,
    RobinSpec,
    SideMismatch,
    constant_field,
    constant_pair,
    extrema,
    field_from_function,
    field_rows,
    integrate,
    pair_sup_distance,
    positive_part,
)
from membrana.geometry import concentric_radial, two_interval


@pytest.fixture
def g():
    return two_interval(0.0, 0.5, 1.0, 9, 13)


def test_field_side_and_shape_validation():
    with pytest.raises(SideMismatch):
        CoefField(side=3, values=np.ones(4))
    with pytest.raises(SideMismatch):
        CoefField(side=1, values=np.ones((2, 2)))
    with pytest.raises(SideMismatch):
        CoefField(side=1, values=np.array([1.0, np.nan]))


def test_field_values_are_frozen(g):
    f = constant_field(g, 1, 2.0)
    with pytest.raises(ValueError):
        f.values[0] = 5.0


def test_check_matches_detects_wrong_length(g):
    f = CoefField(side=1, values=np.ones(4))
    with pytest.raises(SideMismatch):
        f.check_matches(g)
    constant_field(g, 2, 1.0).check_matches(g)


def test_pair_field_requires_side_order(g):
    a = constant_field(g, 1, 1.0)
    b = constant_field(g, 2, 2.0)
    PairField(a, b)
    with pytest.raises(SideMismatch):
        PairField(b, a)


def test_interface_traces_and_jump(g):
    u = PairField(field_from_function(g, 1, lambda x: x),
                  field_from_function(g, 2, lambda x: 2.0 * x))
    t1, t2 = u.interface_traces()
    assert t1 == pytest.approx(0.5)
    assert t2 == pytest.approx(1.0)
    assert u.interface_jump() == pytest.approx(0.5)


def test_sup_norm_takes_both_sides(g):
    u = constant_pair(g, -3.0, 2.0)
    assert u.sup_norm() == 3.0


def test_boundary_condition_signs():
    BoundaryCondition(g=0.0, h=0.0)
    BoundaryCondition(g=2.5, h=1.0)
    with pytest.raises(ValueError):
        BoundaryCondition(g=-1.0)
    with pytest.raises(ValueError):
        BoundaryCondition(g=1.0, h=-0.5)
    with pytest.raises(ValueError):
        BoundaryCondition(g=np.inf)


def test_robin_rejected_at_radial_origin():
    rg = concentric_radial(1.0, 2.0, 5, 5, 3)
    spec = RobinSpec(left=BoundaryCondition(g=1.0))
    with pytest.raises(ValueError):
        spec.validate(rg, side=1)
    # the shell's ends are genuine boundary
    spec.validate(rg, side=2)
    spec.validate(two_interval(0.0, 0.5, 1.0, 5, 5), side=1)


def test_has_forcing():
    assert not RobinSpec().has_forcing()
    assert not RobinSpec(left=BoundaryCondition(g=1.0)).has_forcing()
    assert RobinSpec(right=BoundaryCondition(g=1.0, h=0.25)).has_forcing()


def test_integrate_polynomial(g):
    f = field_from_function(g, 2, lambda x: x)
    # trapezoid is exact for the interpolant of x
    assert integrate(f, g) == pytest.approx((1.0 - 0.25) / 2.0, rel=1e-13)


def test_integrate_radial_weight():
    rg = concentric_radial(1.0, 2.0, 30, 30, 2)
    f = constant_field(rg, 2, 3.0)
    assert integrate(f, rg) == pytest.approx(3.0 * rg.volume(2), rel=1e-13)


def test_positive_part_and_extrema(g):
    f = field_from_function(g, 1, lambda x: np.sin(9.0 * x) - 0.2)
    lo, hi = extrema(f)
    assert lo == f.min() and hi == f.max()
    p = positive_part(f)
    assert p.min() == 0.0
    assert np.all(p.values >= 0.0)
    np.testing.assert_allclose(p.values - np.maximum(f.values, 0.0), 0.0)


def test_field_rows_layout(g):
    u = constant_pair(g, 1.0, 2.0)
    rows = field_rows(g, u)
    assert len(rows) == g.mesh1.size + g.mesh2.size
    assert rows[0] == (1, 0.0, 1.0)
    assert rows[g.mesh1.size - 1] == (1, 0.5, 1.0)
    assert rows[g.mesh1.size] == (2, 0.5, 2.0)
    assert rows[-1] == (2, 1.0, 2.0)


finite_vals = hnp.arrays(dtype=float, shape=st.integers(3, 25),
                         elements=st.floats(-1e6, 1e6, allow_nan=False))


@given(a=finite_vals)
@settings(max_examples=60, deadline=None)
def test_extrema_bound_all_samples(a):
    f = CoefField(side=1, values=a)
    lo, hi = extrema(f)
    assert lo <= hi
    assert np.all(f.values >= lo) and np.all(f.values <= hi)


@given(n=st.integers(3, 20), c=st.floats(-100.0, 100.0, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_integrate_constant_is_volume_scaled(n, c):
    gg = two_interval(-2.0, 0.0, 1.5, n, n)
    assert integrate(constant_field(gg, 1, c), gg) == pytest.approx(2.0 * c, abs=1e-9)


@given(vals=finite_vals)
@settings(max_examples=40, deadline=None)
def test_sup_distance_is_a_metric_on_samples(vals):
    n = vals.size
    gg = two_interval(0.0, 1.0, 2.0, n, n)
    u = PairField(CoefField(1, vals), CoefField(2, np.zeros(n)))
    v = constant_pair(gg, 0.0, 0.0)
    d = pair_sup_distance(u, v)
    assert d == pytest.approx(np.max(np.abs(vals)))
    assert pair_sup_distance(u, u) == 0.0
    assert pair_sup_distance(u, v) == pair_sup_distance(v, u)
