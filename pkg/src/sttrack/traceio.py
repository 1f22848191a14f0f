"""Trace CSV and JSON summary writers.

Floats are written with ``repr`` so a rerun with the same seed produces a
byte-identical file.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from . import __version__
from .engine import SimTrace

SCHEMA_VERSION = 1
CSV_COLUMNS = ("k", "i", "theta", "x", "y", "ohat_x", "ohat_y", "triggered", "messages", "cerr", "terr")


def _f(v: float) -> str:
    return repr(float(v))


def trace_csv_text(trace: SimTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in trace.records:
        cerr, terr = _f(r.cerr), _f(r.terr)
        for i, (th, (x, y), (ox, oy)) in enumerate(zip(r.angles, r.positions, r.estimates)):
            w.writerow((r.k, i, _f(th), _f(x), _f(y), _f(ox), _f(oy),
                        int(r.triggered[i]), r.messages[i], cerr, terr))
    return buf.getvalue()


def write_trace_csv(trace: SimTrace, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(trace_csv_text(trace))
    return path


def read_trace_csv(path: str | Path) -> list[dict[str, Any]]:
    """Rows as dicts with numeric fields converted back."""
    ints = {"k", "i", "triggered", "messages"}
    with open(path, newline="") as fh:
        return [{k: int(v) if k in ints else float(v) for k, v in row.items()}
                for row in csv.DictReader(fh)]


def summary_dict(trace: SimTrace) -> dict[str, Any]:
    s = trace.summary()
    cfg = trace.config
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "sttrack", "version": __version__},
        "seed": cfg.seed,
        "ctime": s.ctime,
        "com_bar": s.com_bar,
        "converged": s.converged,
        "steps": s.steps,
        "omega_max": s.omega_max,
        "final_cerr": s.final_cerr,
        "mean_terr": s.mean_terr,
        "cerr_definition": ("exact Voronoi midpoints" if cfg.strategy == "constant"
                            else "guaranteed midpoints from neighbor records"),
        "cerr_center": {"known_target": "true target",
                        "centralized_ekf": "shared estimate",
                        "decentralized_ekf_ci": "each robot's own estimate"}[cfg.estimator],
        "config": cfg.to_dict(),
    }


def write_summary_json(trace: SimTrace, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary_dict(trace), indent=2, sort_keys=True) + "\n")
    return path
