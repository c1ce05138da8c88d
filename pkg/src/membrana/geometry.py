"""Meshed 1D-reducible domains split by a permeable interface.

Two families are supported:

* ``two_interval``: an interval (x0, x1) split at ``a`` into two open
  subintervals that communicate only through the point ``a``.
* ``concentric_radial``: a ball of radius ``r1`` inside a concentric shell of
  outer radius ``r2`` in dimension ``dim``, reduced to the radial coordinate.
  Integrals carry the surface weight ``w(r) = omega * r**(dim-1)`` where
  ``omega`` is the area of the unit sphere.

Each subdomain carries its own 1D mesh.  The interface coordinate appears as
the last node of ``mesh1`` and again as the first node of ``mesh2``; the two
copies are distinct unknowns, so discrete fields may jump there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


class InvalidBounds(ValueError):
    """Raised when the coordinates defining a geometry are not ordered."""


class TooFewNodes(ValueError):
    """Raised when a mesh has fewer than 3 nodes on some subdomain."""


def unit_sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in R^dim (2 for dim=1, 2*pi, 4*pi, ...)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def _gauss_rule(npts: int) -> tuple[np.ndarray, np.ndarray]:
    if npts not in _GAUSS_CACHE:
        x, w = np.polynomial.legendre.leggauss(npts)
        _GAUSS_CACHE[npts] = (x, w)
    return _GAUSS_CACHE[npts]


@dataclass(frozen=True)
class GeometrySpec:
    """Validated build request for a :class:`Geometry`.

    ``bounds`` is (x0, a, x1) for ``two_interval`` and (r1, r2) for
    ``concentric_radial``.  ``nodes`` gives the node count per subdomain,
    interface node included on both sides.
    """

    kind: str
    bounds: tuple[float, ...]
    nodes: tuple[int, int]
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("two_interval", "concentric_radial"):
            raise InvalidBounds(f"unknown geometry kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidBounds(f"dim must be a positive integer, got {self.dim}")
        if self.kind == "two_interval":
            if self.dim != 1:
                raise InvalidBounds("two_interval geometry forces dim = 1")
            if len(self.bounds) != 3:
                raise InvalidBounds("two_interval needs bounds (x0, a, x1)")
            x0, a, x1 = self.bounds
            if not (x0 < a < x1):
                raise InvalidBounds(f"need x0 < a < x1, got {self.bounds}")
        else:
            if len(self.bounds) != 2:
                raise InvalidBounds("concentric_radial needs bounds (r1, r2)")
            r1, r2 = self.bounds
            if not (0.0 < r1 < r2):
                raise InvalidBounds(f"need 0 < r1 < r2, got {self.bounds}")
        n1, n2 = self.nodes
        if n1 < 3 or n2 < 3:
            raise TooFewNodes(f"each subdomain needs >= 3 nodes, got {self.nodes}")


@dataclass(frozen=True)
class Geometry:
    """Immutable meshed domain pair with quadrature data.

    ``rho1``/``rho2`` are nodal quadrature weights: exact integrals of the
    piecewise-linear hat functions against the measure ``w(r) dr``.  Summing
    ``rho`` recovers the subdomain volume, and ``sum(f * rho)`` integrates the
    nodal interpolant of ``f`` exactly, which keeps every integral in the
    package consistent with the finite element forms.  For a flat weight this
    is the composite trapezoid rule.
    """

    spec: GeometrySpec
    mesh1: np.ndarray
    mesh2: np.ndarray
    w1: np.ndarray = field(repr=False)
    w2: np.ndarray = field(repr=False)
    rho1: np.ndarray = field(repr=False)
    rho2: np.ndarray = field(repr=False)
    interface_measure: float
    volumes: tuple[float, float]
    exterior1: bool
    exterior2: bool

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def interface_coordinate(self) -> float:
        return float(self.mesh1[-1])

    @property
    def h_max(self) -> float:
        return max(float(np.max(np.diff(self.mesh1))),
                   float(np.max(np.diff(self.mesh2))))

    def mesh(self, side: int) -> np.ndarray:
        return self.mesh1 if side == 1 else self.mesh2

    def rho(self, side: int) -> np.ndarray:
        return self.rho1 if side == 1 else self.rho2

    def nodal_weight(self, side: int) -> np.ndarray:
        return self.w1 if side == 1 else self.w2

    def volume(self, side: int) -> float:
        return self.volumes[0] if side == 1 else self.volumes[1]

    def has_exterior_end(self, side: int) -> bool:
        """Whether the non-interface end of ``side`` is true exterior boundary.

        The origin of the radial inner ball is a symmetry point, not a
        boundary piece, so Robin data may not be attached there.
        """
        return self.exterior1 if side == 1 else self.exterior2

    def weight_at(self, r: np.ndarray | float) -> np.ndarray | float:
        if self.kind == "two_interval":
            return np.ones_like(np.asarray(r, dtype=float)) if np.ndim(r) else 1.0
        omega = unit_sphere_area(self.dim)
        return omega * np.asarray(r, dtype=float) ** (self.dim - 1)

    def min_usable_d(self) -> float:
        """Smallest diffusion the meshes resolve, per the (10 h)^2 layer rule."""
        return (10.0 * self.h_max) ** 2


def _hat_moments(mesh: np.ndarray, geom_dim: int, radial: bool) -> tuple[np.ndarray, np.ndarray]:
    """Nodal weights rho_i = int hat_i(r) w(r) dr and nodal weight samples."""
    npts = max(3, (geom_dim + 4) // 2)
    gx, gw = _gauss_rule(npts)
    a = mesh[:-1]
    b = mesh[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    # points: (n_elem, npts)
    pts = mid[:, None] + half[:, None] * gx[None, :]
    jac = half[:, None] * gw[None, :]
    if radial:
        omega = unit_sphere_area(geom_dim)
        wpts = omega * pts ** (geom_dim - 1)
        wnod = omega * mesh ** (geom_dim - 1)
    else:
        wpts = np.ones_like(pts)
        wnod = np.ones_like(mesh)
    lam_r = (pts - a[:, None]) / (b - a)[:, None]
    lam_l = 1.0 - lam_r
    rho = np.zeros_like(mesh)
    np.add.at(rho, np.arange(mesh.size - 1), np.sum(jac * wpts * lam_l, axis=1))
    np.add.at(rho, np.arange(1, mesh.size), np.sum(jac * wpts * lam_r, axis=1))
    return rho, wnod


def element_quadrature(g: Geometry, side: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-element Gauss points and weight-carrying quadrature weights.

    Returns arrays of shape (n_elem, q): coordinates and ``gauss_w * w(r) * jac``.
    Exact for polynomial integrands of the degrees used in P1 assembly.
    """
    mesh = g.mesh(side)
    npts = max(3, (g.dim + 4) // 2)
    gx, gw = _gauss_rule(npts)
    a = mesh[:-1]
    b = mesh[1:]
    half = 0.5 * (b - a)
    pts = 0.5 * (a + b)[:, None] + half[:, None] * gx[None, :]
    jac = half[:, None] * gw[None, :]
    if g.kind == "two_interval":
        wq = jac
    else:
        wq = jac * unit_sphere_area(g.dim) * pts ** (g.dim - 1)
    return pts, wq


def _exact_volumes(spec: GeometrySpec) -> tuple[float, float]:
    if spec.kind == "two_interval":
        x0, a, x1 = spec.bounds
        return (a - x0, x1 - a)
    r1, r2 = spec.bounds
    omega = unit_sphere_area(spec.dim)
    v1 = omega * r1 ** spec.dim / spec.dim
    v2 = omega * (r2 ** spec.dim - r1 ** spec.dim) / spec.dim
    return (v1, v2)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def build_geometry(spec: GeometrySpec) -> Geometry:
    """Build uniform meshes and quadrature data for ``spec``."""
    radial = spec.kind == "concentric_radial"
    if radial:
        lo1, mid, hi = 0.0, spec.bounds[0], spec.bounds[1]
    else:
        lo1, mid, hi = spec.bounds
    n1, n2 = spec.nodes
    mesh1 = np.linspace(lo1, mid, n1)
    mesh2 = np.linspace(mid, hi, n2)
    rho1, w1 = _hat_moments(mesh1, spec.dim, radial)
    rho2, w2 = _hat_moments(mesh2, spec.dim, radial)
    if radial:
        sigma = unit_sphere_area(spec.dim) * mid ** (spec.dim - 1)
    else:
        sigma = 1.0
    return Geometry(
        spec=spec,
        mesh1=_freeze(mesh1),
        mesh2=_freeze(mesh2),
        w1=_freeze(w1),
        w2=_freeze(w2),
        rho1=_freeze(rho1),
        rho2=_freeze(rho2),
        interface_measure=float(sigma),
        volumes=_exact_volumes(spec),
        exterior1=not radial,
        exterior2=True,
    )


def refine(g: Geometry) -> Geometry:
    """Bisect every element of both meshes; bounds and volumes are unchanged."""
    def bisect(mesh: np.ndarray) -> np.ndarray:
        mids = 0.5 * (mesh[:-1] + mesh[1:])
        out = np.empty(mesh.size + mids.size)
        out[0::2] = mesh
        out[1::2] = mids
        return out

    m1 = bisect(g.mesh1)
    m2 = bisect(g.mesh2)
    spec = GeometrySpec(kind=g.spec.kind, bounds=g.spec.bounds,
                        nodes=(m1.size, m2.size), dim=g.spec.dim)
    radial = spec.kind == "concentric_radial"
    rho1, w1 = _hat_moments(m1, spec.dim, radial)
    rho2, w2 = _hat_moments(m2, spec.dim, radial)
    return Geometry(
        spec=spec,
        mesh1=_freeze(m1),
        mesh2=_freeze(m2),
        w1=_freeze(w1),
        w2=_freeze(w2),
        rho1=_freeze(rho1),
        rho2=_freeze(rho2),
        interface_measure=g.interface_measure,
        volumes=g.volumes,
        exterior1=g.exterior1,
        exterior2=g.exterior2,
    )


def two_interval(x0: float, a: float, x1: float, n1: int, n2: int) -> Geometry:
    """Convenience constructor for the split-interval geometry."""
    return build_geometry(GeometrySpec(kind="two_interval", bounds=(x0, a, x1),
                                       nodes=(n1, n2)))


def concentric_radial(r1: float, r2: float, n1: int, n2: int, dim: int) -> Geometry:
    """Convenience constructor for the ball-in-shell geometry."""
    return build_geometry(GeometrySpec(kind="concentric_radial", bounds=(r1, r2),
                                       nodes=(n1, n2), dim=dim))
