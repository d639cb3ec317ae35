"""Deterministic output artifacts: trajectory CSV, reports, manifests, sweep tables.

Identical configuration plus seed must give byte-identical files, so nothing
here writes wall-clock time, and floats are formatted with a fixed repr-grade
format.  Every file carries the configuration digest: CSV files in a leading
comment line, JSON documents under the ``config_digest`` key.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dynamics import Trajectory
from .spatial import Grid1D

__all__ = [
    "fmt",
    "write_trajectory_csv",
    "write_json_doc",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]


def fmt(x: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return format(float(x), ".17g")


def write_trajectory_csv(path: str | Path, traj: Trajectory, grid: Grid1D, stride: int = 1) -> Path:
    """Long-format trajectory table with columns t, x, u, v."""
    path = Path(path)
    xs = grid.nodes()
    lines = [f"# config_digest={traj.config_digest}", "t,x,u,v"]
    for k in range(0, traj.n_states, stride):
        t_txt = fmt(traj.times[k])
        uk = traj.u[k]
        vk = traj.v[k]
        for i in range(xs.size):
            lines.append(f"{t_txt},{fmt(xs[i])},{fmt(uk[i])},{fmt(vk[i])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json_doc(path: str | Path, payload: dict, digest: str) -> Path:
    """JSON document stamped with the configuration digest."""
    path = Path(path)
    doc = {"config_digest": digest, **payload}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


SWEEP_COLUMNS = (
    "parameter",
    "value",
    "dt",
    "converged",
    "iterations",
    "residual",
    "sup_upper_violation",
    "sup_lower_violation",
    "vi_max_positive",
    "u_dt_l2",
    "u_lap_l2",
    "u_grad_linf",
    "v_dt_l2",
    "v_lap_l2",
    "v_grad_linf",
    "yosida_l2",
    "error",
)


def write_sweep_csv(path: str | Path, rows: list[dict], digest: str) -> Path:
    """One row per sweep point, fixed column order, failures kept as rows."""
    path = Path(path)
    lines = [f"# config_digest={digest}", ",".join(SWEEP_COLUMNS)]
    for row in rows:
        cells = []
        for col in SWEEP_COLUMNS:
            val = row.get(col, "")
            if isinstance(val, bool):
                cells.append("true" if val else "false")
            elif isinstance(val, float):
                cells.append(fmt(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
