"""Range-only EKF for a 2-D target, covariance intersection, and target motion models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import ConvexPolygon, Point

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class DegenerateGeometry(ValueError):
    pass


class TargetLeftInterior(RuntimeError):
    pass


@dataclass(frozen=True)
class GaussianBelief:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).reshape(2))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float).reshape(2, 2))

    def is_valid(self, tol: float = 1e-12) -> bool:
        c = self.cov
        if abs(c[0, 1] - c[1, 0]) > tol:
            return False
        return bool(np.all(np.linalg.eigvalsh(c) > 0.0))

    @property
    def point(self) -> Point:
        return float(self.mean[0]), float(self.mean[1])


@dataclass(frozen=True)
class NoiseConfig:
    """Filter noise and the noise actually injected into simulated ranges.

    ``R`` is the target-motion covariance used in prediction, ``q`` the range
    variance assumed by the update. ``measurement_std`` is the standard
    deviation of simulated range noise; ``None`` means ``sqrt(q)``.
    """

    R: np.ndarray = field(default_factory=lambda: 1e-4 * np.eye(2))
    q: float = 1e-2
    measurement_std: float | None = None

    def __post_init__(self):
        r = np.asarray(self.R, dtype=float).reshape(2, 2)
        object.__setattr__(self, "R", r)
        if not np.allclose(r, r.T) or np.any(np.linalg.eigvalsh(r) < 0.0):
            raise ValueError("R must be symmetric positive semidefinite")
        if not self.q > 0.0:
            raise ValueError("q must be positive")
        if self.measurement_std is not None and self.measurement_std < 0.0:
            raise ValueError("measurement_std must be nonnegative")

    @property
    def sensor_std(self) -> float:
        return math.sqrt(self.q) if self.measurement_std is None else self.measurement_std


def _symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + c.T)


def ekf_predict(b: GaussianBelief, R: np.ndarray) -> GaussianBelief:
    return GaussianBelief(b.mean.copy(), b.cov + R)


def ekf_update(b: GaussianBelief, z: float, p: Point, q: float) -> GaussianBelief:
    """Fold one range measurement z taken from robot position p into the belief."""
    diff = b.mean - np.asarray(p, dtype=float)
    r = math.hypot(diff[0], diff[1])
    if r < 1e-9:
        raise DegenerateGeometry("robot coincides with the estimated target mean")
    H = diff / r
    PHt = b.cov @ H
    S = float(H @ PHt) + q
    K = PHt / S
    mean = b.mean + K * (z - r)
    # Joseph form keeps the covariance positive definite under rounding.
    A = np.eye(2) - np.outer(K, H)
    cov = A @ b.cov @ A.T + q * np.outer(K, K)
    return GaussianBelief(mean, _symmetrize(cov))


def covariance_intersection(a: GaussianBelief, b: GaussianBelief, lam: float) -> GaussianBelief:
    """Fuse two beliefs with unknown cross-correlation, weight ``lam`` on ``a``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if lam == 1.0:
        return GaussianBelief(a.mean.copy(), a.cov.copy())
    if lam == 0.0:
        return GaussianBelief(b.mean.copy(), b.cov.copy())
    ia = np.linalg.inv(a.cov)
    ib = np.linalg.inv(b.cov)
    cov = _symmetrize(np.linalg.inv(lam * ia + (1.0 - lam) * ib))
    mean = cov @ (lam * ia @ a.mean + (1.0 - lam) * ib @ b.mean)
    return GaussianBelief(mean, cov)


def _ci_criterion(ia: np.ndarray, ib: np.ndarray, criterion: str):
    def f(lam: float) -> float:
        info = lam * ia + (1.0 - lam) * ib
        det = info[0, 0] * info[1, 1] - info[0, 1] * info[1, 0]
        if criterion == "trace":
            return (info[0, 0] + info[1, 1]) / det
        return 1.0 / det
    return f


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    # The criterion is unimodal on [0, 1] but its minimum may sit on an endpoint.
    return min((x, 0.0, 1.0), key=lambda v: (f(v), abs(v - x)))


def optimize_lambda(a: GaussianBelief, b: GaussianBelief, criterion: str = "trace") -> float:
    if criterion not in ("trace", "det"):
        raise ValueError(f"unknown CI criterion {criterion!r}")
    if np.allclose(a.cov, b.cov, rtol=1e-12, atol=1e-15):
        return 0.5
    f = _ci_criterion(np.linalg.inv(a.cov), np.linalg.inv(b.cov), criterion)
    return golden_section_min(f, 0.0, 1.0, 1e-6)


def fuse(a: GaussianBelief, b: GaussianBelief, criterion: str = "trace") -> GaussianBelief:
    return covariance_intersection(a, b, optimize_lambda(a, b, criterion))


@dataclass(frozen=True)
class TargetModel:
    """Ground truth target motion.

    ``stationary`` sits at ``position``. ``circular`` moves counterclockwise
    with speed ``v_o`` and turn rate ``omega_o`` around ``center`` (radius
    ``v_o / omega_o``), starting at angle ``phase``. ``waypoints`` walks the
    listed points at speed ``v_o`` and stops at the last one.
    """

    kind: str = "stationary"
    position: Point = (0.0, 0.0)
    center: Point = (0.0, 0.0)
    v_o: float = 0.0
    omega_o: float = 0.0
    phase: float = 0.0
    waypoints: tuple[Point, ...] = ()

    def __post_init__(self):
        if self.kind not in ("stationary", "circular", "waypoints"):
            raise ValueError(f"unknown target model {self.kind!r}")
        if self.kind == "circular" and not (self.v_o > 0.0 and self.omega_o != 0.0):
            raise ValueError("circular target needs v_o > 0 and omega_o != 0")
        if self.kind == "waypoints" and (len(self.waypoints) < 1 or not self.v_o > 0.0):
            raise ValueError("waypoint target needs at least one waypoint and v_o > 0")

    @property
    def radius(self) -> float:
        return self.v_o / abs(self.omega_o)

    def position_at(self, t: float) -> Point:
        if self.kind == "stationary":
            return self.position
        if self.kind == "circular":
            ang = self.phase + self.omega_o * t
            r = self.radius
            return (self.center[0] + r * math.cos(ang), self.center[1] + r * math.sin(ang))
        remaining = self.v_o * t
        pts = self.waypoints
        for a, b in zip(pts, pts[1:]):
            seg = math.dist(a, b)
            if remaining <= seg:
                f = remaining / seg if seg > 0 else 0.0
                return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
            remaining -= seg
        return pts[-1]


def target_step(model: TargetModel, t: float, dt: float,
                poly: ConvexPolygon | None = None) -> Point:
    """True target position one step after time t."""
    p = model.position_at(t + dt)
    if poly is not None and not poly.contains_strictly(p):
        raise TargetLeftInterior(f"target left the polygon interior at t={t + dt:.3f}s: {p}")
    return p


def centralized_update(b: GaussianBelief, ranges: Sequence[float],
                       positions: Sequence[Point], noise: NoiseConfig) -> GaussianBelief:
    """One fusion-center step: predict once, then fold every robot's range in index order."""
    b = ekf_predict(b, noise.R)
    for z, p in zip(ranges, positions):
        if z is not None:
            b = ekf_update(b, z, p, noise.q)
    return b
