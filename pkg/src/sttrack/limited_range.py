"""Communication and sensing range bounds, chain bookkeeping, and the modified strategy.

Reachability is a Euclidean (chord) test between consecutive robots. Chain
lengths and the separations between chains are measured along the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .coordination import ControlOutput, RobotLocalState, control
from .geometry import (
    BoundaryPoint,
    ConvexPolygon,
    Point,
    arc_distance,
    inscribed_circle,
    longest_inner_segment,
    ray_exit,
)


@dataclass(frozen=True)
class RangeConfig:
    r_c: float = math.inf
    r_s: float = math.inf

    def __post_init__(self):
        if not (self.r_c > 0.0 and self.r_s > 0.0):
            raise ValueError("communication and sensing ranges must be positive")

    @property
    def limited(self) -> bool:
        return math.isfinite(self.r_c)


class Reach(NamedTuple):
    prev: bool
    next: bool


@dataclass(frozen=True)
class Chain:
    members: tuple[int, ...]
    length: float
    separation: float  # boundary gap to the next chain, ccw; 0 for a closed ring


def necessary_bounds(poly: ConvexPolygon, n: int) -> tuple[float, float]:
    """Smallest (r_c, r_s) that can possibly allow convergence without knowing n."""
    if n < 2:
        raise ValueError("need at least two robots")
    _, r_in = inscribed_circle(poly)
    d_in = 2.0 * r_in
    return d_in * math.sin(math.pi / n), d_in / 2.0


def sufficient_bounds(poly: ConvexPolygon, n: int) -> tuple[float, float]:
    """(r_c, r_s) that guarantee convergence of the modified strategy."""
    if n < 2:
        raise ValueError("need at least two robots")
    return poly.perimeter / n, longest_inner_segment(poly)


def _xy(p: BoundaryPoint | Point) -> Point:
    return p.point if isinstance(p, BoundaryPoint) else p


def within_range(a: BoundaryPoint | Point, b: BoundaryPoint | Point, r_c: float) -> bool:
    return math.dist(_xy(a), _xy(b)) <= r_c


def reachable_neighbors(positions: Sequence[BoundaryPoint | Point], i: int, r_c: float) -> Reach:
    n = len(positions)
    p = positions[i]
    return Reach(within_range(p, positions[(i - 1) % n], r_c),
                 within_range(p, positions[(i + 1) % n], r_c))


def links(positions: Sequence[BoundaryPoint | Point], r_c: float) -> list[bool]:
    """links[i] is True when robot i and robot i+1 can talk."""
    n = len(positions)
    return [within_range(positions[i], positions[(i + 1) % n], r_c) for i in range(n)]


def modified_control(state: RobotLocalState | None, reach: Reach, omega_max: float) -> ControlOutput:
    """Velocity under limited range, before link-preserving clipping.

    With one neighbor in range the robot heads for the missing one at full
    speed (ccw when only ``prev`` is reachable). With both it runs the
    ordinary self-triggered law, which needs ``state``.
    """
    if reach.prev and reach.next:
        if state is None:
            raise ValueError("both neighbors reachable but no local state given")
        return control(state)
    if reach.prev:
        return ControlOutput(omega_max)
    if reach.next:
        return ControlOutput(-omega_max)
    return ControlOutput(0.0)


def clip_to_links(poly: ConvexPolygon, center: Point, theta: float, step: float,
                  anchors: Sequence[Point], r_c: float, tol: float = 1e-6) -> float:
    """Largest fraction of the angular ``step`` that keeps every anchor within r_c.

    Bisects on the fraction until the two bracketing boundary points are
    within ``tol`` meters of each other.
    """
    def ok(f: float) -> bool:
        p = ray_exit(poly, center, theta + f * step).point
        return all(math.dist(p, a) <= r_c for a in anchors)

    if not anchors or ok(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    p_lo = ray_exit(poly, center, theta).point
    p_hi = ray_exit(poly, center, theta + step).point
    while math.dist(p_lo, p_hi) > tol:
        mid = 0.5 * (lo + hi)
        p_mid = ray_exit(poly, center, theta + mid * step).point
        if ok(mid):
            lo, p_lo = mid, p_mid
        else:
            hi, p_hi = mid, p_mid
    return lo


def chain_decomposition(positions: Sequence[BoundaryPoint], poly: ConvexPolygon,
                        r_c: float) -> list[Chain]:
    """Split robots (indexed in ccw order) into maximal runs of linked neighbors."""
    n = len(positions)
    linked = links(positions, r_c)
    if all(linked):
        return [Chain(tuple(range(n)), poly.perimeter, 0.0)]
    # Start right after a broken link so every chain is a contiguous run.
    start = (linked.index(False) + 1) % n
    chains, members = [], []
    for k in range(n):
        i = (start + k) % n
        members.append(i)
        if not linked[i]:
            first, last = members[0], members[-1]
            length = arc_distance(positions[first], positions[last], poly, "ccw")
            sep = arc_distance(positions[last], positions[(last + 1) % n], poly, "ccw")
            chains.append(Chain(tuple(members), length, sep))
            members = []
    return chains
