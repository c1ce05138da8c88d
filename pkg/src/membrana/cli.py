"""Command-line entry point.

Subcommands dispatch to the solver and sweep modules and write CSV plus
JSON sidecar artifacts into the configured output directory.  Exit codes:
0 success, 1 solver error, 2 configuration error, 3 failed check suite.
All output is deterministic for a fixed config and seed: floats are
written with shortest round-trip repr and JSON keys are sorted.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, checks
from .assembly import SingularOperator
from .asymptotics import (HCurve, ResolutionError, SweepTable, trace_h,
                          write_hcurve_csv)
from .config import ConfigError, RunConfig, load_config
from .eigen import NoConvergence as EigenNoConvergence
from .eigen import NonPositiveEigenvector, lambda1
from .fields import field_rows
from .geometry import two_interval
from .logistic import (FitFailed, NegativeIterate, NoConvergence,
                       approximate_large_solution, solve_logistic_membrane)

SOLVER_ERRORS = (EigenNoConvergence, NoConvergence, NonPositiveEigenvector,
                 NegativeIterate, SingularOperator, FitFailed, ResolutionError,
                 ValueError)

SCHEMA_TEXT = """\
CSV artifacts (UTF-8, '.' decimal, one header row):

eigenfunction.csv, state.csv   side,coordinate,value
    One row per mesh node; side is 1 (inner) or 2 (outer); the interface
    node appears once per side.  state.csv is written only when a positive
    steady state exists.

sweep_d.csv, sweep_lambda.csv  param,value,target,deviation
    param   swept value (d, lam, or lam1)
    value   computed summary at that parameter:
              sweep-d eigen:        principal eigenvalue
              sweep-d logistic:     sup-norm of the steady state (0 if none)
              sweep-lambda equal_rates: sup-norm of the state over lam
              sweep-lambda side1:   side-1 sup-norm of the state
    target  the analytic limit the config selects via "limit":
              "small" or "large" parameter limit; side1 mode uses 0.0
    deviation  sup-norm distance to the limit object (field or constant);
              NaN when no positive state exists and the limit is nonzero
    The sidecar (<name>.csv.json) holds the limit values and parameters.

hcurve.csv                     lambda2,h
    Interface-exchange curve samples; sidecar holds sigma1, sigma2 (the
    uncoupled principal levels) and the permeabilities.

profile.csv                    delta,v
    Side-2 steady state at the largest boundary datum, indexed by distance
    delta from the interface; the sidecar holds the datum ladder, interior
    increments, and the power-law fit of the near-interface profile.

checks.json
    List of check suite reports: name, instances, worst_violation, passed,
    and per-suite detail numbers.
"""


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_field_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["side", "coordinate", "value"])
        for side, coord, value in rows:
            writer.writerow([side, repr(float(coord)), repr(float(value))])


def _write_sidecar(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _eigen_tols(cfg: RunConfig) -> dict:
    out = {}
    if "eigen_stop_tol" in cfg.tolerances:
        out["stop_tol"] = cfg.tolerances["eigen_stop_tol"]
    if "eigen_residual_tol" in cfg.tolerances:
        out["residual_tol"] = cfg.tolerances["eigen_residual_tol"]
    return out


def _cmd_eig(cfg: RunConfig) -> int:
    gamma1, gamma2 = cfg.gammas()
    d = cfg.number("d")
    c1 = cfg.coefficient("c1", 1)
    c2 = cfg.coefficient("c2", 2)
    pair = lambda1(d, c1, c2, gamma1, gamma2, cfg.geometry, **_eigen_tols(cfg))
    out = _outdir(cfg)
    _write_field_csv(out / "eigenfunction.csv", field_rows(cfg.geometry, pair.fn))
    _write_sidecar(out / "eigenfunction.csv.json", {
        "lambda1": pair.value, "iterations": pair.iterations,
        "residual": pair.residual, "d": d, "gamma1": gamma1, "gamma2": gamma2,
        "columns": ["side", "coordinate", "value"],
    })
    print(f"lambda1 = {pair.value!r}")
    return 0


def _cmd_logistic(cfg: RunConfig) -> int:
    gamma1, gamma2 = cfg.gammas()
    d = cfg.number("d")
    beta = cfg.coefficient_pair("beta1", "beta2")
    alpha = cfg.coefficient_pair("alpha1", "alpha2")
    stop = cfg.tolerances.get("stop_tol")
    kwargs = {} if stop is None else {"stop_tol": stop}
    res = solve_logistic_membrane(d, beta, alpha, gamma1, gamma2, cfg.geometry,
                                  **kwargs)
    out = _outdir(cfg)
    payload = {"status": res.status, "gate_value": res.gate_value,
               "iterations": res.iterations, "residual": res.residual,
               "d": d, "gamma1": gamma1, "gamma2": gamma2}
    if res.is_positive:
        _write_field_csv(out / "state.csv", field_rows(cfg.geometry, res.field))
        payload["columns"] = ["side", "coordinate", "value"]
    _write_sidecar(out / "state.csv.json", payload)
    print(f"status = {res.status}; gate = {res.gate_value!r}")
    return 0


def _project_sweep(table: SweepTable, value_col: str, target: float,
                   deviation_col: str) -> list:
    values = table.column(value_col)
    deviations = table.column(deviation_col)
    return [(p, v, target, dev)
            for p, v, dev in zip(table.values, values, deviations)]


def _write_projected(path: Path, param: str, rows, meta: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([param, "value", "target", "deviation"])
        for p, v, t, dev in rows:
            writer.writerow([repr(float(p)), repr(float(v)),
                             repr(float(t)), repr(float(dev))])
    _write_sidecar(Path(str(path) + ".json"),
                   {"columns": [param, "value", "target", "deviation"], **meta})


def _cmd_sweep_d(cfg: RunConfig) -> int:
    gamma1, gamma2 = cfg.gammas()
    d_list = cfg.number_list("d_list")
    limit = cfg.get("limit", "large")
    if limit not in ("small", "large"):
        raise ConfigError("'limit' must be \"small\" or \"large\"")
    quantity = cfg.get("quantity", "eigen")
    enforce = cfg.get("enforce_resolution", True)
    if not isinstance(enforce, bool):
        raise ConfigError("'enforce_resolution' must be a boolean")
    out = _outdir(cfg)
    if quantity == "eigen":
        c1 = cfg.coefficient("c1", 1)
        c2 = cfg.coefficient("c2", 2)
        table = asymptotics.sweep_eigen_d(d_list, c1, c2, gamma1, gamma2,
                                          cfg.geometry, enforce_resolution=enforce)
        target = table.meta[f"limit_{limit}_d"]
        rows = [(p, v, target, abs(v - target))
                for p, v in zip(table.values, table.column("lambda1"))]
    elif quantity == "logistic":
        beta = cfg.coefficient_pair("beta1", "beta2")
        alpha = cfg.coefficient_pair("alpha1", "alpha2")
        table = asymptotics.sweep_logistic_d(d_list, beta, alpha, gamma1, gamma2,
                                             cfg.geometry, enforce_resolution=enforce)
        if limit == "small":
            profile = asymptotics.reaction_profile(beta, alpha)
            target = profile.sup_norm()
        else:
            target = max(table.meta["balanced_constant"], 0.0)
        rows = _project_sweep(table, "sup_norm", target, f"gap_{limit}_d")
    else:
        raise ConfigError("'quantity' must be \"eigen\" or \"logistic\"")
    _write_projected(out / "sweep_d.csv", "d", rows,
                     {"limit": limit, "quantity": quantity, **table.meta})
    print(f"wrote {out / 'sweep_d.csv'} ({len(rows)} rows)")
    return 0


def _cmd_sweep_lambda(cfg: RunConfig) -> int:
    gamma1, gamma2 = cfg.gammas()
    mode = cfg.get("mode", "equal_rates")
    d = cfg.number("d", 1.0)
    alpha = cfg.coefficient_pair("alpha1", "alpha2")
    out = _outdir(cfg)
    if mode == "equal_rates":
        lam_list = cfg.number_list("lam_list")
        limit = cfg.get("limit", "small")
        if limit not in ("small", "large"):
            raise ConfigError("'limit' must be \"small\" or \"large\"")
        table = asymptotics.sweep_theta_over_lambda(lam_list, alpha, gamma1,
                                                    gamma2, cfg.geometry, d=d)
        if limit == "small":
            target = table.meta["weighted_constant"]
            rows = _project_sweep(table, "sup_scaled", target,
                                  "gap_weighted_constant")
        else:
            target = table.meta["sup_inverse_alpha"]
            rows = _project_sweep(table, "sup_scaled", target,
                                  "gap_inverse_alpha")
        meta = {"mode": mode, "limit": limit, **table.meta}
    elif mode == "side1":
        lam1_list = cfg.number_list("lam1_list")
        lambda2 = cfg.number("lambda2")
        table = asymptotics.sweep_lambda1(lam1_list, lambda2, alpha, gamma1,
                                          gamma2, cfg.geometry, d=d)
        rows = _project_sweep(table, "sup_side1", 0.0, "gap_side2_vs_uncoupled")
        meta = {"mode": mode, **table.meta}
    else:
        raise ConfigError("'mode' must be \"equal_rates\" or \"side1\"")
    _write_projected(out / "sweep_lambda.csv", table.param, rows, meta)
    print(f"wrote {out / 'sweep_lambda.csv'} ({len(rows)} rows)")
    return 0


def _cmd_curve_h(cfg: RunConfig) -> int:
    gamma1, gamma2 = cfg.gammas()
    lam_list = cfg.number_list("lam_list")
    curve = trace_h(lam_list, gamma1, gamma2, cfg.geometry)
    out = _outdir(cfg)
    write_hcurve_csv(curve, out / "hcurve.csv")
    print(f"sigma1 = {curve.sigma1!r}; sigma2 = {curve.sigma2!r}; "
          f"wrote {out / 'hcurve.csv'}")
    return 0


def _cmd_large(cfg: RunConfig) -> int:
    gamma2 = cfg.number("gamma2")
    lambda2 = cfg.number("lambda2")
    alpha2 = cfg.coefficient("alpha2", 2)
    m_list = cfg.number_list("m_list")
    interior_delta = cfg.number("interior_delta", 0.2)
    window = cfg.get("fit_window", [5.0, 50.0])
    if (not isinstance(window, list) or len(window) != 2
            or any(not isinstance(v, (int, float)) for v in window)):
        raise ConfigError("'fit_window' must be a list of two numbers")
    res = approximate_large_solution(lambda2, alpha2, gamma2, cfg.geometry,
                                     m_list, interior_delta=interior_delta,
                                     fit_window=(float(window[0]), float(window[1])))
    out = _outdir(cfg)
    mesh = cfg.geometry.mesh2
    delta = mesh - mesh[0]
    top = res.fields[-1].values
    with open(out / "profile.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["delta", "v"])
        for dlt, val in zip(delta, top):
            writer.writerow([repr(float(dlt)), repr(float(val))])
    _write_sidecar(out / "profile.csv.json", {
        "columns": ["delta", "v"],
        "m_list": list(res.ms),
        "interior_increments": list(res.interior_increments),
        "interior_delta": res.interior_delta,
        "fit": {"exponent": res.fit.exponent, "prefactor": res.fit.prefactor,
                "window": list(res.fit.window),
                "rms_log_residual": res.fit.rms_log_residual},
        "lambda2": lambda2, "gamma2": gamma2,
    })
    print(f"blow-up exponent = {res.fit.exponent!r}; wrote {out / 'profile.csv'}")
    return 0


_SUITES = {
    "picone": lambda seed, n: [checks.picone_refinement()],
    "bounds": lambda seed, n: [checks.bound_suite(
        seed, n, two_interval(0.0, 0.5, 1.0, 257, 257))],
    "mms-scalar": lambda seed, n: [checks.mms_convergence(problem="scalar_robin")],
    "mms-membrane": lambda seed, n: [checks.mms_convergence(problem="membrane")],
    "all": lambda seed, n: checks.run_all(seed=seed, n_cases=n),
}


def _cmd_check(args: argparse.Namespace) -> int:
    reports = _SUITES[args.suite](args.seed, args.n_cases)
    payload = [json.loads(r.to_json()) for r in reports]
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for r in reports:
        flag = "ok" if r.passed else "FAIL"
        print(f"{flag:4s} {r.name}: worst violation {r.worst_violation!r}")
    return 0 if all(r.passed for r in reports) else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="membrana",
        description="Membrane-coupled eigenvalue and logistic steady-state solver.")
    parser.add_argument("--schema", action="store_true",
                        help="print the documented CSV schemas and exit")
    sub = parser.add_subparsers(dest="command")
    for name, help_text in (
            ("eig", "principal eigenvalue and eigenfunction"),
            ("logistic", "positive steady state of the coupled problem"),
            ("sweep-d", "diffusion sweep against a limit target"),
            ("sweep-lambda", "growth-rate sweep against a limit target"),
            ("curve-h", "trace the interface-exchange curve"),
            ("large", "approximate the boundary blow-up state")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config path")
    p = sub.add_parser("check", help="run verification suites")
    p.add_argument("--suite", default="all", choices=sorted(_SUITES))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n-cases", type=int, default=100)
    p.add_argument("--output", default="checks.json")
    return parser


_DISPATCH = {
    "eig": _cmd_eig,
    "logistic": _cmd_logistic,
    "sweep-d": _cmd_sweep_d,
    "sweep-lambda": _cmd_sweep_lambda,
    "curve-h": _cmd_curve_h,
    "large": _cmd_large,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(SCHEMA_TEXT, end="")
        return 0
    if args.command is None:
        parser.print_usage(file=sys.stderr)
        return 2
    try:
        if args.command == "check":
            return _cmd_check(args)
        cfg = load_config(args.config)
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
