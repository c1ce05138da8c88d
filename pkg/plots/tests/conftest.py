"""Shared fixtures: a real exchange-curve artifact from the solver CLI.

The solver is invoked as a subprocess so this package stays decoupled from
it in-process; only the CSV contract is shared.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

CURVE_SAMPLES = [-1000.0, -700.0, -500.0, -350.0, -250.0, -180.0, -130.0,
                 -90.0, -60.0, -40.0, -25.0, -15.0, -9.0, -5.0, -3.0, -1.5,
                 -0.7, -0.2, 0.0, 0.06]


@pytest.fixture(scope="session")
def hcurve_csv(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("curve")
    cfg = {
        "geometry": {"kind": "two_interval", "bounds": [0.0, 0.5, 1.0],
                     "nodes": [257, 257]},
        "gamma1": 1.0,
        "gamma2": 0.1,
        "lam_list": CURVE_SAMPLES,
        "output_dir": str(tmp / "out"),
    }
    cfg_path = tmp / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    proc = subprocess.run(
        [sys.executable, "-m", "membrana.cli", "curve-h", "--config", str(cfg_path)],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return tmp / "out" / "hcurve.csv"
