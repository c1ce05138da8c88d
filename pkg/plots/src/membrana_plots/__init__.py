"""Figures from membrana CSV artifacts.

Consumes only the documented CSV schemas (see ``membrana --schema``), with
no in-process coupling to the solver package: the exchange curve with its
two asymptote levels, deviation-vs-parameter sweeps, and the near-interface
blow-up profile with its fitted slope.
"""

from .render import KINDS, AxisOptions, PlotJob, build_figure, render
from .schema import Artifact, MissingColumn, load_hcurve, load_profile, load_sweep

__version__ = "0.1.0"

__all__ = [
    "KINDS", "AxisOptions", "PlotJob", "build_figure", "render",
    "Artifact", "MissingColumn", "load_hcurve", "load_profile", "load_sweep",
    "__version__",
]
