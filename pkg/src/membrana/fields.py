"""Nodal coefficient fields on one or both subdomains, plus boundary data.

Coefficients are stored as samples at the mesh nodes of one subdomain and
interpreted as their piecewise-linear interpolants.  Extrema are therefore
nodal extrema, and :func:`integrate` integrates the interpolant exactly
against the geometry's measure, so every reported integral agrees with the
finite element forms to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Geometry


class SideMismatch(ValueError):
    """Raised when a field's sample count does not match its mesh."""


@dataclass(frozen=True)
class CoefField:
    """Nodal samples of a scalar coefficient on one subdomain (side 1 or 2)."""

    side: int
    values: np.ndarray

    def __post_init__(self):
        if self.side not in (1, 2):
            raise SideMismatch(f"side must be 1 or 2, got {self.side}")
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise SideMismatch("field values must be a 1D array")
        if not np.all(np.isfinite(vals)):
            raise SideMismatch("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def check_matches(self, g: Geometry) -> None:
        if self.values.size != g.mesh(self.side).size:
            raise SideMismatch(
                f"side {self.side} field has {self.values.size} samples, "
                f"mesh has {g.mesh(self.side).size} nodes")

    def min(self) -> float:
        return float(np.min(self.values))

    def max(self) -> float:
        return float(np.max(self.values))


@dataclass(frozen=True)
class PairField:
    """A field on each subdomain; the interface traces may differ."""

    u1: CoefField
    u2: CoefField

    def __post_init__(self):
        if self.u1.side != 1 or self.u2.side != 2:
            raise SideMismatch("PairField needs (side-1, side-2) components")

    def part(self, side: int) -> CoefField:
        return self.u1 if side == 1 else self.u2

    def interface_traces(self) -> tuple[float, float]:
        """(trace from side 1, trace from side 2) at the interface."""
        return float(self.u1.values[-1]), float(self.u2.values[0])

    def interface_jump(self) -> float:
        """Side-2 trace minus side-1 trace."""
        t1, t2 = self.interface_traces()
        return t2 - t1

    def sup_norm(self) -> float:
        return max(float(np.max(np.abs(self.u1.values))),
                   float(np.max(np.abs(self.u2.values))))


@dataclass(frozen=True)
class BoundaryCondition:
    """Robin data g, h for one boundary piece: normal derivative + g u = h."""

    g: float
    h: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.g) and np.isfinite(self.h)):
            raise ValueError("Robin data must be finite")
        if self.g < 0.0:
            raise ValueError(f"Robin coefficient must be >= 0, got {self.g}")
        if self.h < 0.0:
            raise ValueError(f"Robin datum must be >= 0, got {self.h}")


@dataclass(frozen=True)
class RobinSpec:
    """Boundary data for a standalone scalar problem on one subdomain.

    ``left`` and ``right`` refer to the ends of the side's 1D mesh; ``None``
    means a natural (Neumann or symmetry) end.  The origin of the radial
    inner ball is a symmetry point and must stay ``None``.
    """

    left: BoundaryCondition | None = None
    right: BoundaryCondition | None = None

    def validate(self, g: Geometry, side: int) -> None:
        if side == 1 and self.left is not None and not g.has_exterior_end(1):
            raise ValueError("no boundary piece at the radial origin; "
                             "left condition must be None")

    def has_forcing(self) -> bool:
        return any(bc is not None and bc.h != 0.0 for bc in (self.left, self.right))


def field_from_function(g: Geometry, side: int, fn: Callable[[np.ndarray], np.ndarray]) -> CoefField:
    """Sample a callable at the side's mesh nodes."""
    vals = np.asarray(fn(g.mesh(side)), dtype=float)
    vals = np.broadcast_to(vals, g.mesh(side).shape).copy()
    return CoefField(side=side, values=vals)


def constant_field(g: Geometry, side: int, value: float) -> CoefField:
    return CoefField(side=side, values=np.full(g.mesh(side).size, float(value)))


def constant_pair(g: Geometry, v1: float, v2: float) -> PairField:
    return PairField(constant_field(g, 1, v1), constant_field(g, 2, v2))


def positive_part(f: CoefField) -> CoefField:
    return CoefField(side=f.side, values=np.maximum(f.values, 0.0))


def extrema(f: CoefField) -> tuple[float, float]:
    """Nodal (min, max) over the closed subdomain."""
    return f.min(), f.max()


def integrate(f: CoefField, g: Geometry) -> float:
    """Integral of the nodal interpolant of ``f`` against the measure w(r) dr.

    Nodal rule with hat-function moments as weights; reduces to the composite
    trapezoid rule when the weight is flat.
    """
    f.check_matches(g)
    return float(np.dot(f.values, g.rho(f.side)))


def pair_sup_distance(u: PairField, v: PairField) -> float:
    return max(float(np.max(np.abs(u.u1.values - v.u1.values))),
               float(np.max(np.abs(u.u2.values - v.u2.values))))


def field_rows(g: Geometry, u: PairField) -> list[tuple[int, float, float]]:
    """(side, coordinate, value) rows for CSV export, interface duplicated."""
    rows = [(1, float(x), float(v)) for x, v in zip(g.mesh1, u.u1.values)]
    rows += [(2, float(x), float(v)) for x, v in zip(g.mesh2, u.u2.values)]
    return rows
