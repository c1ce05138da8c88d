"""Positive steady states of logistic problems, coupled and standalone.

Existence is decided by the sign of the principal eigenvalue of the
linearization at zero (the gate): a positive solution exists iff that value
is negative, and it is then unique.  The solver descends from an explicit
supersolution (or climbs from an eigenfunction subsolution) by a monotone
fixed-point map and finishes with damped Newton steps; both phases act on
the same discrete system, in which the logistic product
is formed nodewise and weighted by the lumped mass.  That keeps the
comparison structure of the map exact: the relaxed matrix is an M-matrix
for any mesh, so iterates stay ordered and positive.

The reported residual is measured in the consistent weak form (full mass
matrix on the nodal product), which tracks the discretization honestly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .assembly import OperatorPair, assemble_membrane, assemble_scalar, tridiagonal_factor
from .eigen import EigenPair, lambda1, principal_scalar
from .fields import (BoundaryCondition, CoefField, PairField, RobinSpec,
                     constant_field)
from .geometry import Geometry

STOP_TOL = 1e-10
NEAR_GATE = 1e-6
MONOTONE_MAX = 200_000
NEWTON_MAX = 60


class NoConvergence(RuntimeError):
    """Raised when the nonlinear iteration exhausts its budget."""


class NegativeIterate(RuntimeError):
    """Raised when an iterate leaves the positive cone it should stay in."""


class FitFailed(RuntimeError):
    """Raised when the near-interface profile does not fit a power law."""


@dataclass(frozen=True)
class LogisticResult:
    """Outcome of a steady-state solve.

    ``status`` is ``"positive"`` (with the unique positive field) or
    ``"no_positive_solution"`` (field None).  ``gate_value`` is the
    principal eigenvalue of the linearization at zero; it is None for
    problems with nonzero boundary data, which always admit a positive
    solution.  ``residual`` is the sup-norm of the consistent weak-form
    residual at the returned field.
    """

    status: str
    field: PairField | CoefField | None
    gate_value: float | None
    iterations: int
    residual: float

    @property
    def is_positive(self) -> bool:
        return self.status == "positive"


def _nonlinear_engine(op: OperatorPair, beta: np.ndarray, alpha: np.ndarray,
                      u0: np.ndarray, stop_tol: float, method: str,
                      monotone_max: int = MONOTONE_MAX,
                      relax_cap: float | None = None) -> tuple[np.ndarray, int]:
    """Drive form*u = lumped*(beta*u - alpha*u^2) + load to convergence.

    ``relax_cap`` overrides the amplitude used to set the relaxation level;
    a start below the solution must pass the ceiling the iterates can reach,
    or the map loses its ordering on the way up.
    """
    lumped = op.lumped_mass
    load = op.load
    cap = float(np.max(u0)) if relax_cap is None else relax_cap
    relax = 2.0 * float(np.max(alpha * cap) + np.max(np.abs(beta)))

    def resid(u: np.ndarray) -> np.ndarray:
        return (op.apply_form(u) - lumped * (beta * u - alpha * u * u) - load)

    def monotone_step(fac, rho: float, u: np.ndarray) -> np.ndarray:
        return fac.solve(lumped * ((beta + rho) * u - alpha * u * u) + load)

    iterations = 0
    u = u0.copy()
    fac = tridiagonal_factor(op.form_sub, op.form_diag + relax * lumped, op.form_sub)

    if method in ("auto", "monotone", "from_below"):
        budget = monotone_max if method in ("monotone", "from_below") \
            else (400 if relax <= 1e3 else 20)
        # the climb from below only needs to reach the Newton basin
        mono_tol = max(stop_tol, 1e-6) if method == "from_below" else stop_tol
        drift_prev = np.inf
        for _ in range(budget):
            unew = monotone_step(fac, relax, u)
            iterations += 1
            if np.min(unew) < -1e-12 * max(1.0, cap):
                raise NegativeIterate(f"iterate dipped to {np.min(unew):.3e}")
            drift = float(np.max(np.abs(unew - u)))
            u = unew
            # geometric tail bound: a contraction with observed rate q has at
            # most drift * q / (1 - q) left to travel
            q = drift / drift_prev if np.isfinite(drift_prev) else 0.0
            drift_prev = max(drift, 1e-300)
            tail = drift * q / (1.0 - q) if q < 1.0 else np.inf
            scale = max(1.0, float(np.max(np.abs(u))))
            floor = 64.0 * np.finfo(float).eps * scale
            if drift < mono_tol * scale and (tail < mono_tol * scale or drift <= floor):
                if method != "from_below":
                    return u, iterations
                break
        if method == "monotone":
            raise NoConvergence(f"monotone iteration still moving after {monotone_max} steps")

    # damped Newton on the same system
    r = resid(u)
    rnorm = float(np.max(np.abs(r)))
    for _ in range(NEWTON_MAX):
        jac_diag = op.form_diag + lumped * (2.0 * alpha * u - beta)
        fac_j = tridiagonal_factor(op.form_sub, jac_diag, op.form_sub)
        delta = fac_j.solve(-r)
        iterations += 1
        if float(np.max(np.abs(delta))) < stop_tol * max(1.0, float(np.max(np.abs(u)))):
            # at the attractor; the residual is at its rounding floor
            u = u + delta
            break
        step = 1.0
        for _ in range(40):
            cand = u + step * delta
            cnorm = float(np.max(np.abs(resid(cand))))
            if cnorm < rnorm * (1.0 - 1e-4 * step) or cnorm < 1e-14 * max(1.0, rnorm):
                break
            step *= 0.5
        else:
            raise NoConvergence("Newton line search found no descent")
        u = u + step * delta
        r = resid(u)
        rnorm = float(np.max(np.abs(r)))
        # no small-step exit here: a shrinking line-search step is a stall,
        # not convergence; only a small full Newton step ends the loop
    else:
        raise NoConvergence(f"Newton did not settle in {NEWTON_MAX} steps")

    # One monotone map application restores strict positivity after Newton.
    # The relax level must dominate the converged iterate, not the start.
    u = np.maximum(u, 0.0)
    relax_out = 2.0 * float(np.max(alpha * u) + np.max(np.abs(beta)))
    fac_out = tridiagonal_factor(op.form_sub, op.form_diag + relax_out * lumped, op.form_sub)
    u = monotone_step(fac_out, relax_out, u)
    iterations += 1
    return u, iterations


def _consistent_residual(op: OperatorPair, beta: np.ndarray, alpha: np.ndarray,
                         u: np.ndarray) -> float:
    weak = op.apply_form(u) - op.apply_B(beta * u - alpha * u * u) - op.load
    return float(np.max(np.abs(weak)))


def _tightened(stop_tol: float, gate: float) -> float:
    if abs(gate) < NEAR_GATE:
        warnings.warn(
            f"gate value {gate:.3e} is nearly critical; the positive solution "
            "is of that order and tolerances are tightened proportionally",
            RuntimeWarning, stacklevel=3)
        return stop_tol * max(abs(gate) / NEAR_GATE, 1e-6)
    return stop_tol


def _check_alpha(alpha_min: float) -> None:
    if alpha_min <= 0.0:
        raise ValueError(f"saturation coefficient must be positive, got min {alpha_min}")


def solve_logistic_membrane(d: float, beta: PairField, alpha: PairField,
                            gamma1: float, gamma2: float, g: Geometry,
                            method: str = "auto",
                            stop_tol: float = STOP_TOL,
                            gate_pair: EigenPair | None = None) -> LogisticResult:
    """Unique positive steady state of the membrane-coupled logistic problem.

    The supersolution start is the constant max over sides of
    ``max(beta) / min(alpha)``; the monotone map never climbs above it.
    ``gate_pair`` may pass a precomputed gate eigenpair to avoid resolving.
    """
    _check_alpha(min(alpha.u1.min(), alpha.u2.min()))
    if gate_pair is None:
        gate_pair = lambda1(d, CoefField(1, -beta.u1.values), CoefField(2, -beta.u2.values),
                            gamma1, gamma2, g)
    gate = gate_pair.value
    if gate >= 0.0:
        return LogisticResult(status="no_positive_solution", field=None,
                              gate_value=gate, iterations=0, residual=0.0)
    stop_tol = _tightened(stop_tol, gate)
    op = assemble_membrane(d, constant_field(g, 1, 0.0), constant_field(g, 2, 0.0),
                           gamma1, gamma2, g)
    beta_vec = op.pack(beta)
    alpha_vec = op.pack(alpha)
    sup = max(beta.u1.max() / alpha.u1.min(), beta.u2.max() / alpha.u2.min())

    if method == "newton_from_subsolution":
        u, iterations = _from_eigen_subsolution(op, beta_vec, alpha_vec,
                                                gate_pair, stop_tol)
    else:
        u0 = np.full(op.n, sup)
        u, iterations = _nonlinear_engine(op, beta_vec, alpha_vec, u0, stop_tol, method)
    field = op.unpack(u)
    return LogisticResult(status="positive", field=field, gate_value=gate,
                          iterations=iterations,
                          residual=_consistent_residual(op, beta_vec, alpha_vec, u))


def _from_eigen_subsolution(op: OperatorPair, beta: np.ndarray, alpha: np.ndarray,
                            gate_pair: EigenPair, stop_tol: float) -> tuple[np.ndarray, int]:
    """Climb from a small multiple of the gate eigenfunction, then Newton.

    The multiple is chosen near the largest one that is still a subsolution;
    the monotone map grows from there toward the solution, and damped Newton
    finishes once the climb has levelled off.  Retries with other multiples
    guard against collapse onto the zero state.
    """
    phi = op.pack(gate_pair.fn)
    eps_max = -gate_pair.value / float(np.max(alpha * phi))
    ceiling = float(np.max(np.maximum(beta, 0.0) / alpha))
    total = 0
    for factor in (0.9, 0.99, 0.5, 0.25):
        u0 = factor * eps_max * phi
        try:
            u, iters = _nonlinear_engine(op, beta, alpha, u0, stop_tol, "from_below",
                                         relax_cap=max(ceiling, float(np.max(u0))))
        except (NoConvergence, NegativeIterate):
            continue
        total += iters
        if float(np.max(u)) > 0.4 * factor * eps_max:
            return u, total
    raise NoConvergence("the climb from the eigenfunction subsolution collapsed")


def solve_logistic_scalar(d: float, beta: CoefField, alpha: CoefField,
                          robin: RobinSpec, g: Geometry,
                          method: str = "auto",
                          stop_tol: float = STOP_TOL,
                          initial_guess: CoefField | None = None) -> LogisticResult:
    """Positive steady state of a standalone logistic problem on one side.

    With zero boundary data the existence gate is the principal eigenvalue
    of the linearization at zero.  With nonzero Robin data a positive
    solution always exists: the start is then S * psi, where psi solves the
    shifted forced problem with unit data and S is large enough to dominate
    both the reaction and the boundary data.
    """
    _check_alpha(alpha.min())
    side = beta.side
    op = assemble_scalar(d, constant_field(g, side, 0.0), robin, g)
    beta_vec = np.array(beta.values)
    alpha_vec = np.array(alpha.values)
    forced = robin.has_forcing()

    gate = None
    if not forced:
        gate_pair = principal_scalar(d, CoefField(side, -beta.values), robin, g)
        gate = gate_pair.value
        if gate >= 0.0:
            return LogisticResult(status="no_positive_solution", field=None,
                                  gate_value=gate, iterations=0, residual=0.0)
        stop_tol = _tightened(stop_tol, gate)

    if initial_guess is not None:
        u0 = np.array(initial_guess.values)
        u, iterations = _nonlinear_engine(op, beta_vec, alpha_vec, u0, stop_tol, "newton")
    elif forced:
        u0 = _forced_supersolution(d, beta_vec, alpha_vec, robin, g, side)
        u, iterations = _nonlinear_engine(op, beta_vec, alpha_vec, u0, stop_tol, method)
    else:
        sup = beta.max() / alpha.min()
        u0 = np.full(op.n, sup)
        u, iterations = _nonlinear_engine(op, beta_vec, alpha_vec, u0, stop_tol, method)

    return LogisticResult(status="positive", field=op.unpack(u), gate_value=gate,
                          iterations=iterations,
                          residual=_consistent_residual(op, beta_vec, alpha_vec, u))


def _forced_supersolution(d: float, beta: np.ndarray, alpha: np.ndarray,
                          robin: RobinSpec, g: Geometry, side: int) -> np.ndarray:
    """Supersolution S * psi for nonzero Robin data."""
    shift = 1.0 + float(np.max(np.abs(beta)))
    unit = RobinSpec(
        left=None if robin.left is None else BoundaryCondition(g=robin.left.g, h=1.0),
        right=None if robin.right is None else BoundaryCondition(g=robin.right.g, h=1.0),
    )
    op = assemble_scalar(d, constant_field(g, side, shift), unit, g)
    fac = tridiagonal_factor(op.a_sub, op.a_diag, op.a_sub)
    psi = fac.solve(op.apply_B(np.ones(op.n)) + op.load)
    if np.min(psi) <= 0.0:
        raise NegativeIterate("auxiliary profile for the supersolution is not positive")
    h_max = max(bc.h for bc in (robin.left, robin.right) if bc is not None)
    needed = (psi * (beta + shift) - 1.0) / (alpha * psi * psi)
    s = max(h_max, float(np.max(needed)), 0.0) * 1.000001 + 1e-12
    return s * psi


@dataclass(frozen=True)
class BlowupFit:
    """Power-law fit v ~ prefactor * delta**(-exponent) near the interface."""

    exponent: float
    prefactor: float
    window: tuple[float, float]
    rms_log_residual: float


@dataclass(frozen=True)
class LargeSolutionResult:
    """Increasing family of forced solutions approximating the large solution."""

    ms: tuple[float, ...]
    fields: tuple[CoefField, ...]
    interior_increments: tuple[float, ...]
    fit: BlowupFit
    interior_delta: float


def approximate_large_solution(lambda2: float, alpha2: CoefField, gamma2: float,
                               g: Geometry, m_list,
                               interior_delta: float = 0.2,
                               fit_window: tuple[float, float] = (5.0, 50.0),
                               stop_tol: float = STOP_TOL) -> LargeSolutionResult:
    """Approximate the boundary blow-up state on side 2 by ramping Robin data.

    Solves the side-2 logistic problem with Robin datum ``m`` on the
    interface and Neumann on the exterior for each ``m`` in the increasing
    ``m_list``, warm-starting each solve from the previous one.  Reports the
    sup-norm increments on the interior compact (distance >= interior_delta
    from the interface) and a log-log power fit of the profile over the
    window [w0*h, w1*h] at the largest datum.
    """
    ms = [float(m) for m in m_list]
    if len(ms) < 4 or any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("need an increasing list of at least 4 data values")
    if ms[-1] < 1000.0 * ms[0]:
        raise ValueError("data values should span at least three decades")
    mesh = g.mesh2
    delta = mesh - mesh[0]
    beta = constant_field(g, 2, lambda2)

    fields: list[CoefField] = []
    prev: CoefField | None = None
    if ms[0] > 100.0:
        # climb to the first datum in decade steps so Newton always warm-starts
        for m in np.geomspace(10.0, ms[0], int(np.log10(ms[0])))[:-1]:
            robin = RobinSpec(left=BoundaryCondition(g=gamma2, h=float(m)), right=None)
            prev = solve_logistic_scalar(1.0, beta, alpha2, robin, g,
                                         stop_tol=stop_tol, initial_guess=prev).field
    for m in ms:
        robin = RobinSpec(left=BoundaryCondition(g=gamma2, h=m), right=None)
        res = solve_logistic_scalar(1.0, beta, alpha2, robin, g,
                                    stop_tol=stop_tol, initial_guess=prev)
        prev = res.field
        fields.append(res.field)

    interior = delta >= interior_delta
    if not np.any(interior):
        raise ValueError(f"no nodes beyond interior_delta={interior_delta}")
    increments = tuple(float(np.max(np.abs(b.values[interior] - a.values[interior])))
                       for a, b in zip(fields, fields[1:]))

    h = float(np.max(np.diff(mesh)))
    lo, hi = fit_window[0] * h, fit_window[1] * h
    sel = (delta >= lo) & (delta <= hi)
    if np.count_nonzero(sel) < 3:
        raise FitFailed(f"fit window [{lo:.3g}, {hi:.3g}] holds fewer than 3 nodes")
    logd = np.log(delta[sel])
    logv = np.log(fields[-1].values[sel])
    coeffs, res_ss = np.polyfit(logd, logv, 1, full=True)[:2]
    rms = float(np.sqrt(res_ss[0] / logd.size)) if res_ss.size else 0.0
    if rms > 0.1:
        raise FitFailed(f"power-law fit rms log-residual {rms:.3g} exceeds 0.1")
    return LargeSolutionResult(
        ms=tuple(ms), fields=tuple(fields),
        interior_increments=increments,
        fit=BlowupFit(exponent=-float(coeffs[0]), prefactor=float(np.exp(coeffs[1])),
                      window=(lo, hi), rms_log_residual=rms),
        interior_delta=interior_delta,
    )
