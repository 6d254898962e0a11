"""File formats: trajectory CSV, regime-map CSV, JSON records."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .model import Params
from .sim import RegimeMap, Trajectory

TRAJECTORY_HEADER = ("tau", "phi", "phi_dot", "margin")
REGIME_HEADER = ("axis1", "axis2", "verdict", "psi_cw", "psi_ccw", "contact_loss_tau")


def fmt17(x) -> str:
    """Round-trippable decimal; NaN and None become empty fields."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def write_trajectory_csv(t: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for row in t.samples:
            writer.writerow([fmt17(v) for v in row])


def read_trajectory_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header {header!r}")
        return np.array([[float(v) for v in row] for row in reader])


def write_regime_csv(m: RegimeMap, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REGIME_HEADER)
        for v1, v2, cell in m.rows():
            writer.writerow(
                [fmt17(v1), fmt17(v2), cell.verdict.value, fmt17(cell.psi_cw),
                 fmt17(cell.psi_ccw), fmt17(cell.contact_loss_tau)]
            )


def to_jsonable(obj):
    """Convert analysis results into plain JSON types.

    Complex numbers become ``{"re": .., "im": ..}``; NaN becomes null.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else float(obj)
    if hasattr(obj, "value"):  # str enums
        return obj.value
    return obj


def write_json(data, path) -> None:
    Path(path).write_text(json.dumps(to_jsonable(data), indent=2) + "\n")


def params_dict(p: Params) -> dict:
    return {"gamma": p.gamma, "alpha": p.alpha, "beta": p.beta, "eps": p.eps, "mu": p.mu}
