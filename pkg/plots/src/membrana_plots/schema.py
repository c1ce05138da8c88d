"""Readers for the documented CSV artifact schemas.

Each artifact is a UTF-8 CSV with one header row and '.' decimals, written
by the solver CLI together with a JSON sidecar at ``<name>.csv.json``.
Readers validate the header against the documented columns and parse all
cells as floats; anything else raises :class:`MissingColumn` so a batch
run fails on the offending file rather than drawing nonsense.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingColumn(ValueError):
    """Raised when a CSV does not match the documented schema."""


@dataclass(frozen=True)
class Artifact:
    """One parsed CSV: column names, a float matrix, and the sidecar."""

    path: Path
    columns: tuple
    data: np.ndarray
    sidecar: dict | None

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise MissingColumn(
                f"{self.path} has no column {name!r} (found {list(self.columns)})"
            ) from None
        return self.data[:, idx]


def read_artifact(path) -> Artifact:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such CSV: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MissingColumn(f"{path} is empty")
    header = tuple(rows[0])
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise MissingColumn(f"{path} has a malformed row: {exc}") from None
    if data.size == 0:
        data = data.reshape(0, len(header))
    if data.shape[1] != len(header):
        raise MissingColumn(f"{path} rows do not match its {len(header)}-column header")
    sidecar_path = Path(str(path) + ".json")
    sidecar = None
    if sidecar_path.is_file():
        sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    return Artifact(path=path, columns=header, data=data, sidecar=sidecar)


def load_hcurve(path) -> Artifact:
    """Exchange-curve samples; the sidecar must carry both uncoupled levels."""
    art = read_artifact(path)
    if art.columns != ("lambda2", "h"):
        raise MissingColumn(
            f"{art.path} is not an exchange-curve CSV: header {list(art.columns)}")
    if art.sidecar is None:
        raise FileNotFoundError(
            f"{art.path} has no sidecar {art.path}.json (holds sigma1/sigma2)")
    for key in ("sigma1", "sigma2"):
        if key not in art.sidecar:
            raise MissingColumn(f"sidecar of {art.path} lacks {key!r}")
    return art


def load_sweep(path) -> Artifact:
    """Parameter sweep rows: param,value,target,deviation."""
    art = read_artifact(path)
    if len(art.columns) != 4 or art.columns[1:] != ("value", "target", "deviation"):
        raise MissingColumn(
            f"{art.path} is not a sweep CSV: header {list(art.columns)}")
    return art


def load_profile(path) -> Artifact:
    """Near-interface profile rows: delta,v."""
    art = read_artifact(path)
    if art.columns != ("delta", "v"):
        raise MissingColumn(
            f"{art.path} is not a profile CSV: header {list(art.columns)}")
    return art
