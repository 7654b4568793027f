"""CSV and sidecar formats.

Paths travel as two-column CSV (``t,value`` on uniform grids,
``x,value`` on wiener grids), floats at 17 significant digits so a
read-back is bit exact.  Every CLI run writes a JSON sidecar
``<out>.meta.json`` echoing the fully resolved configuration.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .paths import OuPath, TimeGrid, WienerPath


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_ou_path(path: OuPath, dest) -> None:
    dest = Path(dest)
    t = path.grid.times()
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for ti, vi in zip(t, path.values):
            w.writerow([_fmt(ti), _fmt(vi)])


def read_ou_path(src) -> OuPath:
    src = Path(src)
    with src.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "value"]:
        raise ValueError(f"{src}: expected header 't,value'")
    t = np.array([float(r[0]) for r in rows[1:]])
    v = np.array([float(r[1]) for r in rows[1:]])
    if t.size < 2:
        raise ValueError(f"{src}: need at least two rows")
    dt = float(np.median(np.diff(t)))
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(dt, 1.0):
        raise ValueError(f"{src}: grid is not uniform")
    return OuPath(TimeGrid(float(t[0]), dt, t.size), v)


def write_wiener_path(path: WienerPath, dest) -> None:
    dest = Path(dest)
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for xi, vi in zip(path.xs, path.values):
            w.writerow([_fmt(xi), _fmt(vi)])


def read_wiener_path(src) -> WienerPath:
    src = Path(src)
    with src.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["x", "value"]:
        raise ValueError(f"{src}: expected header 'x,value'")
    xs = np.array([float(r[0]) for r in rows[1:]])
    v = np.array([float(r[1]) for r in rows[1:]])
    return WienerPath(xs, v)


def write_kernel_table(dest, xs, atom_coeff, pv_coeff, phi_vals) -> None:
    dest = Path(dest)
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "atom_coeff", "pv_coeff", "phi"])
        for xi, pi in zip(xs, phi_vals):
            w.writerow([_fmt(xi), _fmt(atom_coeff), _fmt(pv_coeff), _fmt(pi)])


def write_cov_table(dest, d_t_grid, d_u_grid, values) -> None:
    dest = Path(dest)
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dt", "du", "cov"])
        for i, dtv in enumerate(d_t_grid):
            for j, duv in enumerate(d_u_grid):
                w.writerow([_fmt(dtv), _fmt(duv), _fmt(values[i, j])])


def write_field_table(dest, sample) -> None:
    dest = Path(dest)
    t = sample.t_grid.times()
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "t", "value"])
        for i, ui in enumerate(sample.u_grid):
            for j, tj in enumerate(t):
                w.writerow([_fmt(ui), _fmt(tj), _fmt(sample.values[i, j])])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_sidecar(out_path, payload: dict) -> Path:
    """Write <out>.meta.json next to an output file; returns the sidecar path."""
    side = Path(str(out_path) + ".meta.json")
    side.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return side
