"""Steady-state logistic solves: gates, uniqueness, references, blow-up data.

Reference values for the pinned instances come from the same discretization
driven far past the resolutions used here (Newton on meshes up to 16385
nodes per side, Richardson-extrapolated), so agreement below the coarse-mesh
truncation error is the honest criterion.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from membrana.fields import (
    BoundaryCondition,
    CoefField,
    PairField,
    RobinSpec,
    constant_field,
    constant_pair,
    field_from_function,
    pair_sup_distance,
)
from membrana.geometry import two_interval
from membrana.logistic import (
    FitFailed,
    LogisticResult,
    approximate_large_solution,
    solve_logistic_membrane,
    solve_logistic_scalar,
)

# mesh-limit values for growth (2, -1), unit saturation, unit rates, d=1 on
# (0, 0.5, 1); Richardson extrapolation over 4097/8193/16385 nodes per side
REF_TRACE_1 = 1.1450668246
REF_TRACE_2 = 0.6706730116
REF_SUP = 1.2626108967
REF_GATE = -1.1202939727

# endpoint values for growth -5, unit saturation on (-1, 0) forced by Robin
# data g=1, h=2 at the left end, same extrapolation
REF_FORCED_LEFT = 0.6097479145
REF_FORCED_RIGHT = 0.1233243249


@pytest.fixture
def g():
    return two_interval(0.0, 0.5, 1.0, 257, 257)


def _pinned(g, method="auto"):
    beta = PairField(constant_field(g, 1, 2.0), constant_field(g, 2, -1.0))
    return solve_logistic_membrane(1.0, beta, constant_pair(g, 1.0, 1.0),
                                   1.0, 1.0, g, method=method)


def test_pinned_instance_matches_fine_mesh_reference(g):
    res = _pinned(g)
    assert res.is_positive
    t1, t2 = res.field.interface_traces()
    assert t1 == pytest.approx(REF_TRACE_1, abs=1e-6)
    assert t2 == pytest.approx(REF_TRACE_2, abs=1e-6)
    assert res.field.sup_norm() == pytest.approx(REF_SUP, abs=1e-6)
    assert res.gate_value == pytest.approx(REF_GATE, abs=1e-6)


def test_methods_agree_on_the_same_state(g):
    fields = [_pinned(g, method=m).field for m in
              ("auto", "monotone", "newton_from_subsolution")]
    assert pair_sup_distance(fields[0], fields[1]) <= 1e-8
    assert pair_sup_distance(fields[0], fields[2]) <= 1e-8


def test_constant_supercritical_state_is_exact(g):
    beta = constant_pair(g, 3.0, 3.0)
    res = solve_logistic_membrane(1.0, beta, constant_pair(g, 1.5, 1.5),
                                  1.0, 2.0, g)
    assert res.is_positive
    assert res.gate_value == pytest.approx(-3.0, abs=1e-9)
    np.testing.assert_allclose(res.field.u1.values, 2.0, atol=1e-9)
    np.testing.assert_allclose(res.field.u2.values, 2.0, atol=1e-9)


def test_subcritical_growth_reports_closed_gate(g):
    beta = constant_pair(g, -0.5, -1.0)
    res = solve_logistic_membrane(1.0, beta, constant_pair(g, 1.0, 1.0),
                                  1.0, 1.0, g)
    assert res.status == "no_positive_solution"
    assert res.field is None
    assert not res.is_positive
    assert res.gate_value > 0.0
    assert res.iterations == 0


def test_saturation_must_be_positive(g):
    beta = constant_pair(g, 1.0, 1.0)
    bad = PairField(constant_field(g, 1, 0.0), constant_field(g, 2, 1.0))
    with pytest.raises(ValueError):
        solve_logistic_membrane(1.0, beta, bad, 1.0, 1.0, g)


def test_near_critical_gate_warns_and_stays_positive(g):
    eps = 1e-7
    beta = constant_pair(g, eps, eps)
    with pytest.warns(RuntimeWarning):
        res = solve_logistic_membrane(1.0, beta, constant_pair(g, 1.0, 1.0),
                                      1.0, 1.0, g)
    assert res.is_positive
    assert res.gate_value == pytest.approx(-eps, abs=1e-9)
    np.testing.assert_allclose(res.field.u1.values, eps, rtol=1e-3)
    assert np.min(res.field.u1.values) > 0.0
    assert np.min(res.field.u2.values) > 0.0


def test_state_respects_the_uniform_ceiling(g):
    beta = PairField(field_from_function(g, 1, lambda x: 2.0 + np.sin(5.0 * x)),
                     field_from_function(g, 2, lambda x: 1.0 + x))
    alpha = constant_pair(g, 0.5, 2.0)
    res = solve_logistic_membrane(1.0, beta, alpha, 1.0, 3.0, g)
    ceiling = max(beta.u1.max() / alpha.u1.min(), beta.u2.max() / alpha.u2.min())
    assert res.field.sup_norm() <= ceiling + 1e-9


def test_scalar_homogeneous_constant_state(g):
    beta = constant_field(g, 2, 2.0)
    res = solve_logistic_scalar(1.0, beta, constant_field(g, 2, 4.0),
                                RobinSpec(), g)
    assert res.gate_value == pytest.approx(-2.0, abs=1e-10)
    np.testing.assert_allclose(res.field.values, 0.5, atol=1e-10)


def test_scalar_homogeneous_extinction(g):
    beta = constant_field(g, 2, -1.0)
    res = solve_logistic_scalar(1.0, beta, constant_field(g, 2, 1.0),
                                RobinSpec(), g)
    assert res.status == "no_positive_solution"
    assert res.gate_value == pytest.approx(1.0, abs=1e-10)


def test_forced_problem_matches_fine_mesh_reference():
    g = two_interval(-1.0, 0.0, 1.0, 257, 257)
    robin = RobinSpec(left=BoundaryCondition(g=1.0, h=2.0))
    res = solve_logistic_scalar(1.0, constant_field(g, 1, -5.0),
                                constant_field(g, 1, 1.0), robin, g)
    assert res.is_positive
    assert res.gate_value is None
    assert res.field.values[0] == pytest.approx(REF_FORCED_LEFT, abs=5e-6)
    assert res.field.values[-1] == pytest.approx(REF_FORCED_RIGHT, abs=5e-6)
    assert np.min(res.field.values) > 0.0


def test_forced_problem_is_positive_despite_hostile_growth(g):
    robin = RobinSpec(left=BoundaryCondition(g=2.0, h=1.0))
    res = solve_logistic_scalar(1.0, constant_field(g, 2, -40.0),
                                constant_field(g, 2, 3.0), robin, g)
    assert res.is_positive
    assert np.min(res.field.values) > 0.0


def test_initial_guess_restart_reproduces_the_state(g):
    beta = constant_field(g, 2, 2.0)
    alpha = constant_field(g, 2, 1.0)
    robin = RobinSpec(left=BoundaryCondition(g=1.0, h=0.5))
    first = solve_logistic_scalar(1.0, beta, alpha, robin, g)
    again = solve_logistic_scalar(1.0, beta, alpha, robin, g,
                                  initial_guess=first.field)
    gap = np.max(np.abs(again.field.values - first.field.values))
    assert gap <= 1e-9
    assert again.iterations <= first.iterations


def test_consistent_residual_shrinks_under_refinement():
    resids = []
    for n in (65, 129, 257):
        gg = two_interval(0.0, 0.5, 1.0, n, n)
        beta = PairField(field_from_function(gg, 1, lambda x: 2.0 + np.sin(3.0 * x)),
                         constant_field(gg, 2, 1.0))
        res = solve_logistic_membrane(1.0, beta, constant_pair(gg, 1.0, 1.0),
                                      1.0, 2.0, gg)
        resids.append(res.residual)
    assert resids[0] > resids[1] > resids[2]
    assert resids[0] / resids[2] > 8.0


def test_large_solution_input_validation(g):
    alpha = constant_field(g, 2, 1.0)
    with pytest.raises(ValueError):
        approximate_large_solution(1.0, alpha, 1.0, g, [1e6, 1e7, 1e8])
    with pytest.raises(ValueError):
        approximate_large_solution(1.0, alpha, 1.0, g, [1e6, 1e5, 1e7, 1e8])
    with pytest.raises(ValueError):
        approximate_large_solution(1.0, alpha, 1.0, g, [1e6, 2e6, 4e6, 8e6])


def test_large_solution_fit_rejects_unresolved_window():
    # at this resolution the fit window leaves the pure power-law zone
    gg = two_interval(0.0, 0.5, 1.0, 129, 321)
    alpha = constant_field(gg, 2, 1600.0)
    with pytest.raises(FitFailed):
        approximate_large_solution(1600.0, alpha, 1.0, gg, [1e6, 1e7, 1e8, 1e9])


def test_result_dataclass_shape():
    res = LogisticResult(status="no_positive_solution", field=None,
                         gate_value=0.25, iterations=0, residual=0.0)
    assert not res.is_positive


@given(seed=st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_gate_sign_decides_existence_property(seed):
    rng = np.random.default_rng(seed)
    gg = two_interval(0.0, 0.5, 1.0, 33, 33)
    b1 = rng.uniform(-2.0, 2.0) + rng.uniform(-0.5, 0.5) * np.sin(3.0 * gg.mesh1)
    b2 = rng.uniform(-2.0, 2.0) + rng.uniform(-0.5, 0.5) * np.cos(2.0 * gg.mesh2)
    beta = PairField(CoefField(1, b1), CoefField(2, b2))
    alpha = constant_pair(gg, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))
    res = solve_logistic_membrane(1.0, beta, alpha, 1.0, 1.0, gg)
    if res.gate_value < 0.0:
        assert res.is_positive
        assert res.field.u1.min() > 0.0 and res.field.u2.min() > 0.0
    else:
        assert res.field is None
