"""Convergence error, convergence time, message rate and target error."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coordination import RobotLocalState, guaranteed_midpoint, voronoi_midpoint
from .geometry import angle_diff


@dataclass(frozen=True)
class MetricsSummary:
    ctime: int | None
    com_bar: float
    cerr: tuple[float, ...]
    terr: tuple[float, ...]

    @property
    def converged(self) -> bool:
        return self.ctime is not None


def cerr_constant(angles: Sequence[float]) -> float:
    """Sum of distances to the exact Voronoi midpoints; angles in ccw index order."""
    n = len(angles)
    if n < 3:
        raise ValueError("need at least three robots")
    return math.fsum(
        abs(angles[i] - voronoi_midpoint(angles[i - 1], angles[i], angles[(i + 1) % n]))
        for i in range(n)
    )


def cerr_term_self(state: RobotLocalState) -> float:
    return abs(state.theta - guaranteed_midpoint(state))


def cerr_self(states: Sequence[RobotLocalState]) -> float:
    """Sum of distances to the guaranteed midpoints built from each robot's records."""
    return math.fsum(cerr_term_self(s) for s in states)


def convergence_threshold(n: int) -> float:
    return 0.1 * n


def ctime(cerr_series: Sequence[float], n: int, start: int = 0) -> int | None:
    """First step index with Cerr below 0.1*n, or None if it never gets there."""
    thr = convergence_threshold(n)
    for k, c in enumerate(cerr_series):
        if c < thr:
            return start + k
    return None


def com_bar(com_totals: Sequence[int], ctime_steps: int | None, n: int) -> float:
    """Messages per robot per step over the first ``ctime_steps`` steps (0 if ctime is 0)."""
    if not ctime_steps:
        return 0.0
    return float(sum(com_totals)) / (n * ctime_steps)


def terr(estimates: Sequence[Sequence[float]], true_o: Sequence[float],
         mode: str = "decentralized") -> float:
    est = np.asarray(estimates, dtype=float).reshape(-1, 2)
    err = np.linalg.norm(est - np.asarray(true_o, dtype=float), axis=1)
    if mode == "centralized":
        return float(err[0])
    if mode == "decentralized":
        return float(err.mean())
    raise ValueError(f"unknown mode {mode!r}")


def circular_distance(a: float, b: float) -> float:
    return abs(angle_diff(a, b))
