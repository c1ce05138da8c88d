"""Verification suites: ratio identity, randomized bounds, convergence orders."""

import json

import numpy as np
import pytest

from membrana.checks import (
    CheckReport,
    NonPositiveU,
    bound_suite,
    mms_convergence,
    picone_refinement,
    picone_residual,
    run_all,
)
from membrana.eigen import principal_scalar
from membrana.fields import (
    BoundaryCondition,
    CoefField,
    RobinSpec,
    constant_field,
    field_from_function,
)
from membrana.geometry import two_interval
from membrana.logistic import solve_logistic_scalar


@pytest.fixture
def g():
    return two_interval(-1.0, 0.0, 1.0, 129, 129)


@pytest.fixture
def robin():
    return RobinSpec(left=BoundaryCondition(g=1.0, h=0.0), right=None)


def test_report_json_roundtrip():
    rep = CheckReport(name="demo", instances=3, worst_violation=-0.5,
                      passed=False, detail={"k": [1.0, 2.0]})
    data = json.loads(rep.to_json())
    assert data["name"] == "demo"
    assert data["passed"] is False
    assert data["detail"]["k"] == [1.0, 2.0]


def test_identity_is_exact_for_proportional_fields(g, robin):
    u = field_from_function(g, 2, lambda x: 2.0 + np.sin(2.0 * x))
    v = CoefField(2, 3.0 * u.values)
    # v/u constant: both sides of the identity vanish identically
    assert picone_residual(u, v, robin, g) <= 1e-12


def test_identity_residual_is_scale_invariant(g, robin):
    beta = constant_field(g, 2, 2.0)
    sol = solve_logistic_scalar(1.0, beta, constant_field(g, 2, 1.0), robin, g)
    eig = principal_scalar(1.0, constant_field(g, 2, 0.0), robin, g)
    r1 = picone_residual(sol.field, eig.fn, robin, g)
    scaled = CoefField(2, 7.0 * eig.fn.values)
    r2 = picone_residual(sol.field, scaled, robin, g)
    assert r1 == pytest.approx(r2, rel=1e-4)
    assert r1 < 1e-6


def test_identity_rejects_nonpositive_reference(g, robin):
    u = field_from_function(g, 2, lambda x: x)
    v = constant_field(g, 2, 1.0)
    with pytest.raises(NonPositiveU):
        picone_residual(u, v, robin, g)


def test_identity_rejects_side_mismatch_and_bad_kind(g, robin):
    u = constant_field(g, 2, 1.0)
    with pytest.raises(ValueError):
        picone_residual(u, constant_field(g, 1, 1.0), robin, g)
    with pytest.raises(ValueError):
        picone_residual(u, u, robin, g, f_kind="squared")


def test_refinement_suite_passes_and_reports_order():
    rep = picone_refinement(levels=3, base_nodes=33)
    assert rep.passed
    assert rep.worst_violation == 0.0
    res = rep.detail["residuals"]
    assert res[0] > res[1] > res[2]
    assert rep.detail["orders"][-1] >= 1.8


def test_bound_suite_is_deterministic_for_a_seed():
    g = two_interval(0.0, 0.5, 1.0, 65, 65)
    a = bound_suite(7, 5, g)
    b = bound_suite(7, 5, g)
    assert a.detail == b.detail
    assert a.passed
    assert a.instances == 5
    c = bound_suite(8, 5, g)
    assert c.detail["margins"] != a.detail["margins"]


def test_bound_suite_margins_are_nonnegative():
    g = two_interval(0.0, 0.5, 1.0, 65, 65)
    rep = bound_suite(123, 10, g)
    assert rep.passed
    for name, margin in rep.detail["margins"].items():
        if margin is not None:
            assert margin >= -1e-8, name
    assert rep.detail["gates_passed"] >= 1


def test_bound_suite_rejects_empty_run():
    g = two_interval(0.0, 0.5, 1.0, 65, 65)
    with pytest.raises(ValueError):
        bound_suite(0, 0, g)


@pytest.mark.parametrize("problem", ["scalar_robin", "membrane"])
def test_mms_orders_are_second_order(problem):
    rep = mms_convergence(levels=3, problem=problem)
    assert rep.passed
    errs = rep.detail["errors"]
    assert errs[0] > errs[1] > errs[2]
    assert 1.8 <= rep.detail["orders"][-1] <= 2.2


def test_mms_validates_arguments():
    with pytest.raises(ValueError):
        mms_convergence(levels=2)
    with pytest.raises(ValueError):
        mms_convergence(problem="cube")


def test_run_all_returns_every_suite():
    reports = run_all(seed=3, n_cases=4)
    names = [r.name for r in reports]
    assert names == ["picone_refinement", "bound_suite",
                     "mms_scalar_robin", "mms_membrane"]
    assert all(r.passed for r in reports)
