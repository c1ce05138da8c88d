"""Parameter sweeps against closed-form limit targets, and the exchange curve.

Every sweep returns a :class:`SweepTable` whose columns pair computed
quantities with the analytic targets they approach, so CSV output is
self-contained: a consumer can judge convergence without re-deriving the
targets.  The exchange curve ``H`` maps a side-2 growth rate to the unique
side-1 rate at which the coupled linearization is exactly critical; it is
traced by bracketed root finding on the principal eigenvalue.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .eigen import lambda1, sigma_uncoupled
from .fields import (BoundaryCondition, CoefField, PairField, RobinSpec,
                     constant_field, constant_pair, integrate, pair_sup_distance,
                     positive_part)
from .geometry import Geometry
from .logistic import solve_logistic_membrane, solve_logistic_scalar

__all__ = [
    "ResolutionError", "SweepTable", "HCurve",
    "small_d_limit", "weighted_mean_limit", "balanced_constant",
    "reaction_profile", "require_resolved",
    "sweep_eigen_d", "sweep_logistic_d", "sweep_theta_over_lambda",
    "sweep_lambda1", "trace_h", "write_sweep_csv", "write_hcurve_csv",
]


class ResolutionError(ValueError):
    """Raised when a requested diffusion is too small for the mesh."""


def require_resolved(g: Geometry, d: float) -> None:
    """Refuse diffusion layers thinner than ten mesh cells."""
    floor = g.min_usable_d()
    if d < floor:
        raise ResolutionError(
            f"d={d:.3e} is below the mesh floor {floor:.3e}; refine the mesh "
            "or pass enforce_resolution=False")


def small_d_limit(c1: CoefField, c2: CoefField) -> float:
    """Vanishing-diffusion limit of the principal eigenvalue."""
    return min(c1.min(), c2.min())


def weighted_mean_limit(c1: CoefField, c2: CoefField, gamma1: float,
                        gamma2: float, g: Geometry) -> float:
    """Large-diffusion limit: permeability-weighted mean of the potentials."""
    num = gamma2 * integrate(c1, g) + gamma1 * integrate(c2, g)
    den = gamma2 * g.volume(1) + gamma1 * g.volume(2)
    return num / den


def balanced_constant(beta: PairField, alpha: PairField, gamma1: float,
                      gamma2: float, g: Geometry) -> float:
    """Large-diffusion logistic limit; a negative value signals extinction."""
    num = gamma2 * integrate(CoefField(1, beta.u1.values), g) \
        + gamma1 * integrate(CoefField(2, beta.u2.values), g)
    den = gamma2 * integrate(CoefField(1, alpha.u1.values), g) \
        + gamma1 * integrate(CoefField(2, alpha.u2.values), g)
    return num / den


def reaction_profile(beta: PairField, alpha: PairField) -> PairField:
    """Vanishing-diffusion logistic limit: positive part of beta over alpha."""
    return PairField(
        CoefField(1, positive_part(beta.u1).values / alpha.u1.values),
        CoefField(2, positive_part(beta.u2).values / alpha.u2.values),
    )


@dataclass(frozen=True)
class SweepTable:
    """One swept parameter with aligned result columns and analytic targets."""

    param: str
    values: tuple
    columns: tuple  # pairs (name, tuple of per-value entries)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> tuple:
        for key, col in self.columns:
            if key == name:
                return col
        raise KeyError(name)

    @property
    def header(self) -> list:
        return [self.param] + [name for name, _ in self.columns]

    def rows(self):
        cols = [col for _, col in self.columns]
        for i, v in enumerate(self.values):
            yield [v] + [col[i] for col in cols]


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (int, float, np.floating)) else str(x)


def write_sweep_csv(table: SweepTable, path) -> None:
    """Write the table and a JSON sidecar with targets and parameters."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.header)
        for row in table.rows():
            writer.writerow([_fmt(x) for x in row])
    sidecar = {"param": table.param, "columns": [name for name, _ in table.columns],
               "meta": table.meta}
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sweep_eigen_d(d_values, c1: CoefField, c2: CoefField, gamma1: float,
                  gamma2: float, g: Geometry,
                  enforce_resolution: bool = True) -> SweepTable:
    """Principal eigenvalue over a diffusion range, with both limit targets."""
    lo = small_d_limit(c1, c2)
    hi = weighted_mean_limit(c1, c2, gamma1, gamma2, g)
    vals = []
    for d in d_values:
        if enforce_resolution:
            require_resolved(g, d)
        vals.append(lambda1(d, c1, c2, gamma1, gamma2, g).value)
    return SweepTable(
        param="d", values=tuple(float(d) for d in d_values),
        columns=(
            ("lambda1", tuple(vals)),
            ("limit_small_d", tuple(lo for _ in vals)),
            ("limit_large_d", tuple(hi for _ in vals)),
        ),
        meta={"limit_small_d": lo, "limit_large_d": hi,
              "gamma1": gamma1, "gamma2": gamma2, "kind": g.kind},
    )


def sweep_logistic_d(d_values, beta: PairField, alpha: PairField, gamma1: float,
                     gamma2: float, g: Geometry,
                     enforce_resolution: bool = True) -> SweepTable:
    """Steady-state sup-distance to the small-d and large-d limit profiles.

    Columns hold the sup-norm gap to the reaction profile (small d) and to
    the balanced constant (large d); extinction rows carry status "none"
    and NaN gaps.
    """
    target_small = reaction_profile(beta, alpha)
    level = balanced_constant(beta, alpha, gamma1, gamma2, g)
    lvl = max(level, 0.0)
    target_large = constant_pair(g, lvl, lvl)
    statuses, gaps_small, gaps_large, sups = [], [], [], []
    for d in d_values:
        if enforce_resolution:
            require_resolved(g, d)
        res = solve_logistic_membrane(d, beta, alpha, gamma1, gamma2, g)
        if res.is_positive:
            u = res.field
            statuses.append("positive")
            gaps_small.append(pair_sup_distance(u, target_small))
            gaps_large.append(pair_sup_distance(u, target_large))
            sups.append(u.sup_norm())
        else:
            statuses.append("none")
            gaps_small.append(float("nan"))
            gaps_large.append(float("nan"))
            sups.append(0.0)
    return SweepTable(
        param="d", values=tuple(float(d) for d in d_values),
        columns=(
            ("status", tuple(statuses)),
            ("sup_norm", tuple(sups)),
            ("gap_small_d", tuple(gaps_small)),
            ("gap_large_d", tuple(gaps_large)),
        ),
        meta={"balanced_constant": level, "gamma1": gamma1, "gamma2": gamma2,
              "kind": g.kind},
    )


def sweep_theta_over_lambda(lam_values, alpha: PairField, gamma1: float,
                            gamma2: float, g: Geometry, d: float = 1.0) -> SweepTable:
    """Scaled steady states u/lam for a flat growth rate lam on both sides.

    As lam grows the scaled state approaches 1/alpha pointwise; as lam
    vanishes it flattens to a constant.  Both the permeability-weighted
    constant and the unweighted one are tabulated; they coincide when the
    permeabilities match.
    """
    ratio_w = (gamma2 * g.volume(1) + gamma1 * g.volume(2)) / (
        gamma2 * integrate(CoefField(1, alpha.u1.values), g)
        + gamma1 * integrate(CoefField(2, alpha.u2.values), g))
    ratio_p = (g.volume(1) + g.volume(2)) / (
        integrate(CoefField(1, alpha.u1.values), g)
        + integrate(CoefField(2, alpha.u2.values), g))
    inv_alpha = PairField(CoefField(1, 1.0 / alpha.u1.values),
                          CoefField(2, 1.0 / alpha.u2.values))
    sups, gw, gp, gi = [], [], [], []
    for lam in lam_values:
        if lam <= 0:
            raise ValueError("growth rates must be positive in this sweep")
        beta = constant_pair(g, float(lam), float(lam))
        res = solve_logistic_membrane(d, beta, alpha, gamma1, gamma2, g)
        scaled = PairField(CoefField(1, res.field.u1.values / lam),
                           CoefField(2, res.field.u2.values / lam))
        sups.append(scaled.sup_norm())
        gw.append(pair_sup_distance(scaled, constant_pair(g, ratio_w, ratio_w)))
        gp.append(pair_sup_distance(scaled, constant_pair(g, ratio_p, ratio_p)))
        gi.append(pair_sup_distance(scaled, inv_alpha))
    return SweepTable(
        param="lam", values=tuple(float(x) for x in lam_values),
        columns=(
            ("sup_scaled", tuple(sups)),
            ("gap_weighted_constant", tuple(gw)),
            ("gap_plain_constant", tuple(gp)),
            ("gap_inverse_alpha", tuple(gi)),
        ),
        meta={"weighted_constant": ratio_w, "plain_constant": ratio_p,
              "sup_inverse_alpha": float(inv_alpha.sup_norm()),
              "gamma1": gamma1, "gamma2": gamma2, "d": d, "kind": g.kind},
    )


def sweep_lambda1(lam1_values, lambda2: float, alpha: PairField, gamma1: float,
                  gamma2: float, g: Geometry, d: float = 1.0) -> SweepTable:
    """Side-1 growth sweep at fixed side-2 rate.

    Tabulates the side-1 sup-norm, its rescaling by sqrt(-lam1) (finite
    only for negative rates, where the side-1 state decays at that order),
    and the side-2 sup-distance to the uncoupled side-2 state with an
    absorbing interface, which is the side-2 limit as lam1 -> -inf.
    """
    w2 = solve_logistic_scalar(
        d, constant_field(g, 2, lambda2), alpha.u2,
        RobinSpec(left=BoundaryCondition(g=gamma2, h=0.0), right=None), g)
    if not w2.is_positive:
        raise ValueError("the uncoupled side-2 state must exist for this sweep")
    sup1, scaled1, gap2 = [], [], []
    for lam1 in lam1_values:
        beta = PairField(constant_field(g, 1, float(lam1)),
                         constant_field(g, 2, lambda2))
        res = solve_logistic_membrane(d, beta, alpha, gamma1, gamma2, g)
        if not res.is_positive:
            raise ValueError(f"no positive state at lam1={lam1}")
        s1 = float(np.max(res.field.u1.values))
        sup1.append(s1)
        scaled1.append(s1 * float(np.sqrt(-lam1)) if lam1 < 0 else float("nan"))
        gap2.append(float(np.max(np.abs(res.field.u2.values - w2.field.values))))
    return SweepTable(
        param="lam1", values=tuple(float(x) for x in lam1_values),
        columns=(
            ("sup_side1", tuple(sup1)),
            ("sup_side1_scaled", tuple(scaled1)),
            ("gap_side2_vs_uncoupled", tuple(gap2)),
        ),
        meta={"lambda2": lambda2, "gamma1": gamma1, "gamma2": gamma2, "d": d,
              "kind": g.kind},
    )


@dataclass(frozen=True)
class HCurve:
    """Sampled exchange curve and the two uncoupled principal levels."""

    lambda2_values: tuple
    h_values: tuple
    sigma1: float
    sigma2: float
    gamma1: float
    gamma2: float

    def rows(self):
        for lam2, h in zip(self.lambda2_values, self.h_values):
            yield lam2, h


def h_value(lambda2: float, gamma1: float, gamma2: float, g: Geometry,
            sigma2: float | None = None) -> float:
    """Side-1 rate at which the coupled linearization is exactly critical.

    Defined for lambda2 below the uncoupled side-2 level; the eigenvalue is
    strictly decreasing in the side-1 rate, so a sign-changing bracket plus
    Brent's method pins the root.
    """
    if sigma2 is None:
        sigma2 = sigma_uncoupled(g, gamma1, gamma2)[1]
    if lambda2 >= sigma2 - 1e-9:
        raise ValueError(
            f"lambda2={lambda2} is not below the uncoupled side-2 level {sigma2:.6g}")
    c2 = constant_field(g, 2, -lambda2)

    def crit(nu1: float) -> float:
        return lambda1(1.0, constant_field(g, 1, -nu1), c2, gamma1, gamma2, g).value

    lo, hi = -1.0, 1.0
    while crit(lo) < 0.0:
        lo *= 4.0
    while crit(hi) > 0.0:
        hi *= 4.0
    return float(brentq(crit, lo, hi, xtol=1e-12, rtol=8.9e-16, maxiter=200))


def trace_h(lambda2_values, gamma1: float, gamma2: float, g: Geometry) -> HCurve:
    """Sample the exchange curve over a grid of side-2 rates."""
    sigma1, sigma2 = sigma_uncoupled(g, gamma1, gamma2)
    hs = tuple(h_value(float(l2), gamma1, gamma2, g, sigma2=sigma2)
               for l2 in lambda2_values)
    return HCurve(lambda2_values=tuple(float(x) for x in lambda2_values),
                  h_values=hs, sigma1=sigma1, sigma2=sigma2,
                  gamma1=gamma1, gamma2=gamma2)


def write_hcurve_csv(curve: HCurve, path) -> None:
    """Write lambda2,h rows and a sidecar with the uncoupled levels."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda2", "h"])
        for lam2, h in curve.rows():
            writer.writerow([_fmt(lam2), _fmt(h)])
    sidecar = {"sigma1": curve.sigma1, "sigma2": curve.sigma2,
               "gamma1": curve.gamma1, "gamma2": curve.gamma2,
               "columns": ["lambda2", "h"]}
    with open(str(path) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
