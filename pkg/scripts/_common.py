"""Shared bits for the experiment scripts."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from sttrack.config import load_scenario

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def scenario(name: str, overrides: list[str] | None = None):
    return load_scenario(SCENARIOS / name, overrides)[0]


def out_dir(path: str) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


def mean_std(xs):
    a = np.asarray([x for x in xs if x is not None], dtype=float)
    return (float(a.mean()), float(a.std())) if a.size else (None, None)
