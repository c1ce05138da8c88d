"""Figure construction and deterministic file rendering.

Three artifact kinds are supported.  ``hcurve`` draws the exchange curve
with a horizontal asymptote at the side-1 uncoupled level and a vertical
one at the side-2 level.  ``sweep`` draws deviation against the swept
parameter on log-log axes.  ``profile`` draws the near-interface state on
log-log axes with its fitted power law.  Rendering never mutates inputs,
and writing the same job twice produces byte-identical files: volatile
metadata (dates, tool versions) is stripped at save time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# a fixed hash salt keeps SVG element ids stable across renders
matplotlib.rcParams["svg.hashsalt"] = "membrana-plots"

import matplotlib.pyplot as plt
import numpy as np

from .schema import load_hcurve, load_profile, load_sweep

KINDS = ("hcurve", "sweep", "profile")


@dataclass(frozen=True)
class AxisOptions:
    """Overrides applied after the kind defaults; None keeps the default."""

    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    logx: bool | None = None
    logy: bool | None = None


@dataclass(frozen=True)
class PlotJob:
    """One rendering task: input CSVs, a kind, and the output image path."""

    kind: str
    inputs: tuple
    output: str
    axes: AxisOptions = field(default_factory=AxisOptions)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; expected one of {KINDS}")
        paths = tuple(Path(p) for p in self.inputs)
        if not paths:
            raise ValueError("need at least one input CSV")
        for p in paths:
            if not p.is_file():
                raise FileNotFoundError(f"no such CSV: {p}")
        object.__setattr__(self, "inputs", paths)


def _draw_hcurve(ax, job: PlotJob) -> None:
    first = load_hcurve(job.inputs[0])
    for path in job.inputs:
        art = load_hcurve(path)
        line, = ax.plot(art.column("lambda2"), art.column("h"),
                        marker=".", ms=4, lw=1.4)
        line.set_gid("curve")
    sigma1 = float(first.sidecar["sigma1"])
    sigma2 = float(first.sidecar["sigma2"])
    a1 = ax.axhline(sigma1, color="0.45", ls="--", lw=1.0)
    a1.set_gid("sigma1-asymptote")
    a2 = ax.axvline(sigma2, color="0.45", ls=":", lw=1.0)
    a2.set_gid("sigma2-asymptote")
    ax.annotate(r"$\sigma_1$", xy=(0.02, sigma1), xycoords=("axes fraction", "data"),
                va="bottom", fontsize=11)
    ax.annotate(r"$\sigma_2$", xy=(sigma2, 0.04), xycoords=("data", "axes fraction"),
                ha="left", fontsize=11)
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.axvline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.set_xlabel(r"$\lambda_2$")
    ax.set_ylabel(r"$H(\lambda_2)$")


def _draw_sweep(ax, job: PlotJob) -> None:
    negative = False
    param = None
    for path in job.inputs:
        art = load_sweep(path)
        param = art.columns[0]
        x = art.column(param)
        dev = art.column("deviation")
        keep = np.isfinite(dev) & (dev > 0.0) & (x != 0.0)
        negative = negative or bool(np.any(x[keep] < 0.0))
        line, = ax.plot(np.abs(x[keep]), dev[keep], marker="o", ms=4, lw=1.2,
                        label=path.stem)
        line.set_gid("sweep")
    if len(job.inputs) > 1:
        ax.legend(frameon=False, fontsize=9)
    ax.set_xlabel(f"|{param}|" if negative else param)
    ax.set_ylabel("deviation from target")
    ax.grid(True, which="both", lw=0.3, alpha=0.5)


def _profile_fit(art) -> tuple[float, float, tuple[float, float]]:
    """Exponent, prefactor, window: sidecar fit if present, else a data fit."""
    if art.sidecar is not None and "fit" in art.sidecar:
        fit = art.sidecar["fit"]
        return (float(fit["exponent"]), float(fit["prefactor"]),
                (float(fit["window"][0]), float(fit["window"][1])))
    delta = art.column("delta")
    v = art.column("v")
    keep = delta > 0.0
    coeffs = np.polyfit(np.log(delta[keep]), np.log(v[keep]), 1)
    window = (float(np.min(delta[keep])), float(np.max(delta[keep])))
    return -float(coeffs[0]), float(np.exp(coeffs[1])), window


def _draw_profile(ax, job: PlotJob) -> None:
    art = load_profile(job.inputs[0])
    delta = art.column("delta")
    v = art.column("v")
    keep = delta > 0.0
    line, = ax.plot(delta[keep], v[keep], lw=1.4)
    line.set_gid("profile")
    exponent, prefactor, window = _profile_fit(art)
    span = np.geomspace(window[0], window[1], 32)
    fit_line, = ax.plot(span, prefactor * span ** (-exponent), ls="--",
                        color="0.35", lw=1.0)
    fit_line.set_gid("fit")
    ax.annotate(f"slope $\\approx$ {-exponent:.2f}", xy=(0.55, 0.85),
                xycoords="axes fraction", fontsize=10)
    ax.set_xlabel(r"$\delta$")
    ax.set_ylabel(r"$v(\delta)$")


_DRAW = {"hcurve": _draw_hcurve, "sweep": _draw_sweep, "profile": _draw_profile}
_LOG_DEFAULTS = {"hcurve": (False, False), "sweep": (True, True),
                 "profile": (True, True)}


def build_figure(job: PlotJob):
    """The assembled figure for a job, without writing anything."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=120)
    _DRAW[job.kind](ax, job)
    logx, logy = _LOG_DEFAULTS[job.kind]
    opts = job.axes
    if opts.logx if opts.logx is not None else logx:
        ax.set_xscale("log")
    if opts.logy if opts.logy is not None else logy:
        ax.set_yscale("log")
    if opts.title is not None:
        ax.set_title(opts.title)
    if opts.xlabel is not None:
        ax.set_xlabel(opts.xlabel)
    if opts.ylabel is not None:
        ax.set_ylabel(opts.ylabel)
    fig.tight_layout()
    return fig


# savefig defaults embed a creation date (SVG, PDF) or a tool version
# string (PNG); both are suppressed so re-renders are byte-identical
_STRIP = {".png": {"Software": None}, ".svg": {"Date": None},
          ".pdf": {"CreationDate": None}}


def render(job: PlotJob) -> Path:
    """Write the figure for a job and return the output path."""
    fig = build_figure(job)
    out = Path(job.output)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, metadata=_STRIP.get(out.suffix.lower()))
    finally:
        plt.close(fig)
    return out
