"""P1 finite element assembly for the membrane-coupled and scalar operators.

The membrane operator acts on a stacked vector (side-1 nodes, then side-2
nodes).  Side-2 blocks are scaled by ``gamma1/gamma2`` so that the interface
coupling, which penalizes the jump between the two interface traces with
strength ``d * gamma1 * |interface|``, lands symmetrically.  The resulting
matrices are tridiagonal in this ordering: the two interface unknowns are
adjacent, and the coupling block is their 2x2 bond.

``form_part`` is the diffusion-plus-boundary part of the operator (it carries
the factor ``d``); adding the zero-order mass term for the reaction
coefficient gives ``A``.  ``B`` is the consistent mass matrix in the same
weighting.  For a flux balance, ``form_part`` of the membrane operator kills
constants: every row sums to the coupling terms, which cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lapack

from .fields import CoefField, PairField, RobinSpec
from .geometry import Geometry, element_quadrature


class DimensionMismatch(ValueError):
    """Raised when field samples and operator unknowns disagree."""


class SingularOperator(RuntimeError):
    """Raised when elimination meets a pivot below 1e-14 of its row scale."""


@dataclass
class TriFactor:
    """LU factorization of a tridiagonal matrix (LAPACK gttrf/gttrs).

    For the diagonally dominant M-matrices produced here no row interchanges
    occur, elimination is cancellation-free, and a nonnegative right-hand
    side yields a nonnegative solution; the eigen solver relies on this to
    keep iterates positive down to the underflow floor.
    """

    dl: np.ndarray
    dpiv: np.ndarray
    du: np.ndarray
    du2: np.ndarray
    ipiv: np.ndarray

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgttrs(self.dl, self.dpiv, self.du, self.du2,
                                self.ipiv, rhs)
        if info != 0:
            raise SingularOperator(f"tridiagonal back-substitution failed (info={info})")
        return x


def tridiagonal_factor(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray) -> TriFactor:
    """Factor the tridiagonal matrix with the given bands."""
    scale = np.abs(diag).copy()
    scale[:-1] += np.abs(sup)
    scale[1:] += np.abs(sub)
    dl, dpiv, du, du2, ipiv, info = lapack.dgttrf(sub, diag, sup)
    if info > 0 or np.any(np.abs(dpiv) <= 1e-14 * scale):
        bad = int(np.argmin(np.abs(dpiv) / np.maximum(scale, 1e-300)))
        raise SingularOperator(f"pivot {dpiv[bad]:.3e} at row {bad}")
    return TriFactor(dl=dl, dpiv=dpiv, du=du, du2=du2, ipiv=ipiv)


@dataclass
class _SideBlocks:
    """Per-side banded pieces before global stacking."""

    stiff_off: np.ndarray      # n-1, off-diagonal of int w u' v'
    mass_off: np.ndarray       # n-1
    mass_diag: np.ndarray      # n
    cmass_off: np.ndarray      # n-1
    cmass_diag: np.ndarray     # n
    rho: np.ndarray            # n, hat moments (lumped mass)


def _side_blocks(g: Geometry, side: int, c: np.ndarray) -> _SideBlocks:
    mesh = g.mesh(side)
    pts, wq = element_quadrature(g, side)
    h = np.diff(mesh)
    lam_r = (pts - mesh[:-1, None]) / h[:, None]
    lam_l = 1.0 - lam_r
    s0 = np.sum(wq * lam_l ** 3, axis=1)
    s1 = np.sum(wq * lam_l ** 2 * lam_r, axis=1)
    s2 = np.sum(wq * lam_l * lam_r ** 2, axis=1)
    s3 = np.sum(wq * lam_r ** 3, axis=1)
    welem = np.sum(wq, axis=1)

    n = mesh.size
    stiff_off = -welem / h ** 2
    mass_off = s1 + s2
    mass_diag = np.zeros(n)
    np.add.at(mass_diag, np.arange(n - 1), s0 + s1)
    np.add.at(mass_diag, np.arange(1, n), s2 + s3)

    cl = c[:-1]
    cr = c[1:]
    cmass_off = cl * s1 + cr * s2
    cmass_diag = np.zeros(n)
    np.add.at(cmass_diag, np.arange(n - 1), cl * s0 + cr * s1)
    np.add.at(cmass_diag, np.arange(1, n), cl * s2 + cr * s3)

    rho = np.zeros(n)
    np.add.at(rho, np.arange(n - 1), s0 + 2.0 * s1 + s2)
    np.add.at(rho, np.arange(1, n), s1 + 2.0 * s2 + s3)
    return _SideBlocks(stiff_off, mass_off, mass_diag, cmass_off, cmass_diag, rho)


@dataclass
class OperatorPair:
    """Assembled (A, B) for a generalized problem A u = value * B u + loads.

    ``a_sub``/``a_diag`` etc. hold the symmetric bands; sparse matrices are
    materialized on demand.  ``lumped_mass`` is the diagonal of the row-sum
    lumping of ``B`` (the quadrature hat moments in the operator weighting).
    """

    g: Geometry
    scope: str                       # "membrane" or "scalar"
    side: int                        # scalar problems: which subdomain
    d: float
    gamma1: float
    gamma2: float
    n1: int
    n2: int
    a_sub: np.ndarray = field(repr=False)
    a_diag: np.ndarray = field(repr=False)
    b_sub: np.ndarray = field(repr=False)
    b_diag: np.ndarray = field(repr=False)
    form_sub: np.ndarray = field(repr=False)
    form_diag: np.ndarray = field(repr=False)
    lumped_mass: np.ndarray = field(repr=False)
    load: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.a_diag.size

    def _mat(self, sub: np.ndarray, diag: np.ndarray) -> sp.csr_matrix:
        return sp.diags([sub, diag, sub], offsets=[-1, 0, 1], format="csr")

    @property
    def A(self) -> sp.csr_matrix:
        return self._mat(self.a_sub, self.a_diag)

    @property
    def B(self) -> sp.csr_matrix:
        return self._mat(self.b_sub, self.b_diag)

    @property
    def form_part(self) -> sp.csr_matrix:
        return self._mat(self.form_sub, self.form_diag)

    def apply(self, sub: np.ndarray, diag: np.ndarray, x: np.ndarray) -> np.ndarray:
        out = diag * x
        out[:-1] += sub * x[1:]
        out[1:] += sub * x[:-1]
        return out

    def apply_A(self, x: np.ndarray) -> np.ndarray:
        return self.apply(self.a_sub, self.a_diag, x)

    def apply_B(self, x: np.ndarray) -> np.ndarray:
        return self.apply(self.b_sub, self.b_diag, x)

    def apply_form(self, x: np.ndarray) -> np.ndarray:
        return self.apply(self.form_sub, self.form_diag, x)

    def norm_A(self) -> float:
        return float(np.max(np.abs(self.apply(np.abs(self.a_sub), np.abs(self.a_diag),
                                              np.ones(self.n)))))

    def norm_B(self) -> float:
        return float(np.max(np.abs(self.apply(np.abs(self.b_sub), np.abs(self.b_diag),
                                              np.ones(self.n)))))

    def shifted_factor(self, shift: float, extra_diag: np.ndarray | None = None) -> TriFactor:
        """Factor A - shift * B (plus an optional extra diagonal)."""
        sub = self.a_sub - shift * self.b_sub
        diag = self.a_diag - shift * self.b_diag
        if extra_diag is not None:
            diag = diag + extra_diag
        return tridiagonal_factor(sub, diag, sub)

    def pack(self, u) -> np.ndarray:
        if self.scope == "membrane":
            if not isinstance(u, PairField):
                raise DimensionMismatch("membrane operator expects a PairField")
            vec = np.concatenate([u.u1.values, u.u2.values])
        else:
            if not isinstance(u, CoefField) or u.side != self.side:
                raise DimensionMismatch(f"scalar operator expects a side-{self.side} field")
            vec = np.array(u.values, dtype=float)
        if vec.size != self.n:
            raise DimensionMismatch(f"expected {self.n} samples, got {vec.size}")
        return vec

    def unpack(self, vec: np.ndarray):
        if self.scope == "membrane":
            return PairField(CoefField(1, vec[:self.n1].copy()),
                             CoefField(2, vec[self.n1:].copy()))
        return CoefField(self.side, vec.copy())


def assemble_membrane(d: float, c1: CoefField, c2: CoefField,
                      gamma1: float, gamma2: float, g: Geometry) -> OperatorPair:
    """Assemble the coupled operator pair for reaction coefficients (c1, c2)."""
    if d <= 0.0:
        raise ValueError(f"diffusion must be positive, got {d}")
    if gamma1 <= 0.0 or gamma2 <= 0.0:
        raise ValueError("membrane permeabilities must be positive")
    c1.check_matches(g)
    c2.check_matches(g)
    blk1 = _side_blocks(g, 1, c1.values)
    blk2 = _side_blocks(g, 2, c2.values)
    ratio = gamma1 / gamma2
    n1 = g.mesh1.size
    n2 = g.mesh2.size
    n = n1 + n2

    form_sub = np.zeros(n - 1)
    form_sub[:n1 - 1] = d * blk1.stiff_off
    form_sub[n1:] = d * ratio * blk2.stiff_off
    coupling = d * gamma1 * g.interface_measure
    form_sub[n1 - 1] = -coupling
    form_diag = np.zeros(n)
    # diagonal built from the off-diagonals so constants stay in the kernel
    np.add.at(form_diag, np.arange(n - 1), -form_sub)
    np.add.at(form_diag, np.arange(1, n), -form_sub)

    b_sub = np.zeros(n - 1)
    b_sub[:n1 - 1] = blk1.mass_off
    b_sub[n1:] = ratio * blk2.mass_off
    b_diag = np.concatenate([blk1.mass_diag, ratio * blk2.mass_diag])

    c_sub = np.zeros(n - 1)
    c_sub[:n1 - 1] = blk1.cmass_off
    c_sub[n1:] = ratio * blk2.cmass_off
    c_diag = np.concatenate([blk1.cmass_diag, ratio * blk2.cmass_diag])

    return OperatorPair(
        g=g, scope="membrane", side=0, d=d, gamma1=gamma1, gamma2=gamma2,
        n1=n1, n2=n2,
        a_sub=form_sub + c_sub, a_diag=form_diag + c_diag,
        b_sub=b_sub, b_diag=b_diag,
        form_sub=form_sub, form_diag=form_diag,
        lumped_mass=np.concatenate([blk1.rho, ratio * blk2.rho]),
        load=np.zeros(n),
    )


def assemble_scalar(d: float, c: CoefField, robin: RobinSpec,
                    g: Geometry, side: int | None = None) -> OperatorPair:
    """Assemble the operator pair for one subdomain with Robin/Neumann ends.

    Robin terms enter scaled by ``d`` (they come from the diffusion flux), so
    with ``c = 0`` the whole matrix scales linearly in ``d``.  Nonzero Robin
    data contribute to ``load``.
    """
    if d <= 0.0:
        raise ValueError(f"diffusion must be positive, got {d}")
    side = c.side if side is None else side
    if side != c.side:
        raise DimensionMismatch(f"coefficient lives on side {c.side}, requested {side}")
    c.check_matches(g)
    robin.validate(g, side)
    blk = _side_blocks(g, side, c.values)
    mesh = g.mesh(side)
    n = mesh.size

    form_sub = d * blk.stiff_off
    form_diag = np.zeros(n)
    np.add.at(form_diag, np.arange(n - 1), -form_sub)
    np.add.at(form_diag, np.arange(1, n), -form_sub)
    load = np.zeros(n)
    wl = float(g.weight_at(mesh[0]))
    wr = float(g.weight_at(mesh[-1]))
    if robin.left is not None:
        form_diag[0] += d * robin.left.g * wl
        load[0] += d * robin.left.h * wl
    if robin.right is not None:
        form_diag[-1] += d * robin.right.g * wr
        load[-1] += d * robin.right.h * wr

    return OperatorPair(
        g=g, scope="scalar", side=side, d=d, gamma1=1.0, gamma2=1.0,
        n1=n if side == 1 else 0, n2=n if side == 2 else 0,
        a_sub=form_sub + blk.cmass_off, a_diag=form_diag + blk.cmass_diag,
        b_sub=blk.mass_off, b_diag=blk.mass_diag,
        form_sub=form_sub, form_diag=form_diag,
        lumped_mass=blk.rho.copy(),
        load=load,
    )


def solve_forced(op: OperatorPair, f):
    """Solve A u = B f + load for nodal forcing ``f`` (weak right-hand side)."""
    rhs = op.apply_B(op.pack(f)) + op.load
    fac = tridiagonal_factor(op.a_sub, op.a_diag, op.a_sub)
    return op.unpack(fac.solve(rhs))


def dump_matrix(sub: np.ndarray, diag: np.ndarray, path: str) -> None:
    """Write (row, col, value) triplets of a symmetric tridiagonal matrix."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, v in enumerate(diag):
            fh.write(f"{i} {i} {float(v)!r}\n")
        for i, v in enumerate(sub):
            fh.write(f"{i + 1} {i} {float(v)!r}\n")
            fh.write(f"{i} {i + 1} {float(v)!r}\n")
