"""Principal eigenvalues of the assembled operator pairs.

The principal pair is computed by shifted inverse power iteration on
``A - shift * B`` with ``shift = c_lower - 1``, where ``c_lower`` is any
lower bound on the principal eigenvalue (the nodal minimum of the reaction
coefficient works: diffusion, interface and Robin terms only push the
spectrum up).  The shifted matrix is then positive definite and, being an
M-matrix on resolved meshes, keeps every iterate strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import (OperatorPair, SingularOperator, assemble_membrane,
                       assemble_scalar)
from .fields import BoundaryCondition, CoefField, PairField, RobinSpec, constant_field
from .geometry import Geometry

STOP_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MAX_ITER = 10_000


class NoConvergence(RuntimeError):
    """Raised when inverse iteration exceeds its iteration budget."""


class NonPositiveEigenvector(RuntimeError):
    """Raised when the converged mode is not strictly positive.

    The principal mode of the continuous problem is positive; a sign change
    in the discrete mode signals a mesh too coarse for the requested data.
    """


@dataclass(frozen=True)
class EigenPair:
    """Principal eigenvalue with its positive, sup-normalized eigenfunction."""

    value: float
    fn: PairField | CoefField
    iterations: int
    residual: float


def principal_pair(op: OperatorPair, c_lower: float,
                   stop_tol: float = STOP_TOL,
                   residual_tol: float = RESIDUAL_TOL,
                   max_iter: int = MAX_ITER) -> EigenPair:
    """Smallest eigenvalue of A u = value B u, with positive eigenvector.

    ``c_lower`` must not exceed the principal eigenvalue; the iteration
    shifts one unit below it.
    """
    shift = c_lower - 1.0
    fac = op.shifted_factor(shift)
    norm_bound = None
    margin_exp = 2
    x = np.ones(op.n)
    value = np.dot(x, op.apply_A(x)) / np.dot(x, op.apply_B(x))
    for k in range(1, max_iter + 1):
        y = fac.solve(op.apply_B(x))
        y /= np.max(np.abs(y))
        new_value = np.dot(y, op.apply_A(y)) / np.dot(y, op.apply_B(y))
        drift = abs(new_value - value)
        x = y
        value = new_value
        if drift < stop_tol * max(1.0, abs(value)):
            residual = float(np.max(np.abs(op.apply_A(x) - value * op.apply_B(x))))
            if norm_bound is None:
                norm_bound = op.norm_A() + abs(value) * op.norm_B()
            if residual <= residual_tol * norm_bound:
                break
        if k % 250 == 0:
            # Clustered spectra stall the fixed shift; move it toward the
            # Rayleigh estimate, which never undershoots the target.  A
            # near-singular factorization means the margin was too thin.
            margin = (1.0 + abs(value)) * 10.0 ** (-margin_exp)
            new_shift = value - margin
            if new_shift > shift + margin:
                try:
                    fac = op.shifted_factor(new_shift)
                except SingularOperator:
                    margin_exp = max(margin_exp - 2, 1)
                else:
                    shift = new_shift
                    margin_exp = min(margin_exp + 2, 8)
    else:
        raise NoConvergence(f"inverse iteration did not settle in {max_iter} steps")

    x = x / x[int(np.argmax(np.abs(x)))]
    if np.min(x) <= 0.0:
        raise NonPositiveEigenvector(
            "principal mode has nonpositive nodal values; refine the mesh")
    return EigenPair(value=float(value), fn=op.unpack(x),
                     iterations=k, residual=residual)


def lambda1(d: float, c1: CoefField, c2: CoefField,
            gamma1: float, gamma2: float, g: Geometry,
            **kwargs) -> EigenPair:
    """Principal eigenvalue of the membrane-coupled operator."""
    op = assemble_membrane(d, c1, c2, gamma1, gamma2, g)
    c_lower = min(c1.min(), c2.min())
    return principal_pair(op, c_lower, **kwargs)


def principal_scalar(d: float, c: CoefField, robin: RobinSpec,
                     g: Geometry, **kwargs) -> EigenPair:
    """Principal eigenvalue of a standalone scalar Robin problem."""
    op = assemble_scalar(d, c, robin, g)
    return principal_pair(op, c.min(), **kwargs)


def sigma_uncoupled(g: Geometry, gamma1: float, gamma2: float) -> tuple[float, float]:
    """Decoupling thresholds of the two subdomains.

    Side 1 sees Robin ``gamma1`` on the interface and natural conditions
    elsewhere; side 2 sees Robin ``gamma2`` on the interface and Neumann on
    the exterior.  Both use unit diffusion and zero reaction, and both
    values are positive.
    """
    s1 = principal_scalar(1.0, constant_field(g, 1, 0.0),
                          RobinSpec(right=BoundaryCondition(g=gamma1)), g)
    s2 = principal_scalar(1.0, constant_field(g, 2, 0.0),
                          RobinSpec(left=BoundaryCondition(g=gamma2)), g)
    return s1.value, s2.value
