"""JSON run configuration: strict parsing, expression compilation, defaults.

A config is one JSON object.  Unknown keys anywhere are rejected so typos
fail loudly before any solve.  Coefficients are expression strings in the
variable ``x`` (or ``r``), compiled by the package's own small parser; the
geometry block mirrors :class:`membrana.geometry.GeometrySpec`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .expr import ExpressionError, compile_expression
from .fields import CoefField, PairField
from .geometry import Geometry, GeometrySpec, build_geometry

TOP_KEYS = {
    "geometry", "c1", "c2", "beta1", "beta2", "alpha1", "alpha2",
    "gamma1", "gamma2", "d", "d_list", "lam_list", "lam1_list",
    "lambda1", "lambda2", "m_list", "mode", "limit", "quantity",
    "tolerances", "output_dir", "seed", "interior_delta", "fit_window",
    "suite", "n_cases", "enforce_resolution",
}
GEOMETRY_KEYS = {"kind", "bounds", "nodes", "dim"}
TOLERANCE_KEYS = {"stop_tol", "eigen_stop_tol", "eigen_residual_tol"}


class ConfigError(ValueError):
    """Raised for malformed, unknown, or missing configuration entries."""


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with the geometry already built."""

    data: dict
    geometry: Geometry
    output_dir: str
    seed: int
    tolerances: dict = field(default_factory=dict)

    def require(self, *keys: str):
        missing = [k for k in keys if k not in self.data]
        if missing:
            raise ConfigError(f"missing required config keys: {', '.join(missing)}")
        vals = [self.data[k] for k in keys]
        return vals[0] if len(vals) == 1 else vals

    def get(self, key: str, default=None):
        return self.data.get(key, default)

    def number(self, key: str, default=None) -> float:
        val = self.data.get(key, default)
        if val is None:
            raise ConfigError(f"missing required numeric key: {key}")
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"key {key!r} must be a number, got {val!r}")
        return float(val)

    def number_list(self, key: str) -> list:
        val = self.data.get(key)
        if (not isinstance(val, list) or not val
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in val)):
            raise ConfigError(f"key {key!r} must be a nonempty list of numbers")
        return [float(v) for v in val]

    def coefficient(self, key: str, side: int, default: str | None = None) -> CoefField:
        text = self.data.get(key, default)
        if text is None:
            raise ConfigError(f"missing required coefficient expression: {key}")
        if not isinstance(text, str):
            raise ConfigError(f"coefficient {key!r} must be an expression string")
        try:
            fn = compile_expression(text)
        except ExpressionError as exc:
            raise ConfigError(f"coefficient {key!r}: {exc}") from exc
        return CoefField(side, fn(self.geometry.mesh(side)))

    def coefficient_pair(self, key1: str, key2: str,
                         default: str | None = None) -> PairField:
        return PairField(self.coefficient(key1, 1, default),
                         self.coefficient(key2, 2, default))

    def gammas(self) -> tuple[float, float]:
        g1 = self.number("gamma1")
        g2 = self.number("gamma2")
        if g1 <= 0.0 or g2 <= 0.0:
            raise ConfigError("permeabilities gamma1, gamma2 must be positive")
        return g1, g2


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


def load_config(path: str) -> RunConfig:
    """Read, validate, and materialize a JSON config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(data, TOP_KEYS, "config")

    geo = data.get("geometry")
    if not isinstance(geo, dict):
        raise ConfigError("config requires a 'geometry' object")
    _reject_unknown(geo, GEOMETRY_KEYS, "geometry")
    for key in ("kind", "bounds", "nodes"):
        if key not in geo:
            raise ConfigError(f"geometry requires {key!r}")
    try:
        spec = GeometrySpec(kind=geo["kind"], bounds=tuple(geo["bounds"]),
                            nodes=tuple(geo["nodes"]), dim=int(geo.get("dim", 1)))
        geometry = build_geometry(spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad geometry: {exc}") from exc

    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    _reject_unknown(tolerances, TOLERANCE_KEYS, "tolerances")
    for key, val in tolerances.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)) or val <= 0:
            raise ConfigError(f"tolerance {key!r} must be a positive number")

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("'seed' must be an integer")
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("'output_dir' must be a string")

    return RunConfig(data=data, geometry=geometry, output_dir=output_dir,
                     seed=seed, tolerances=dict(tolerances))
