"""Convex polygon boundary, the boundary <-> unit circle mapping, and derived sizes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

TWO_PI = 2.0 * math.pi

Point = tuple[float, float]


class GeometryError(ValueError):
    pass


class InvalidPolygon(GeometryError):
    pass


class CenterOutsidePolygon(GeometryError):
    pass


class DegeneratePoint(GeometryError):
    pass


def wrap_angle(a: float) -> float:
    """Normalize to [0, 2*pi)."""
    w = math.fmod(a, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    if w >= TWO_PI:  # fmod rounding of -tiny
        w = 0.0
    return w


def angle_diff(a: float, b: float) -> float:
    """Signed difference a - b mapped to (-pi, pi]."""
    d = math.fmod(a - b, TWO_PI)
    if d > math.pi:
        d -= TWO_PI
    elif d <= -math.pi:
        d += TWO_PI
    return d


def ccw_gap(a: float, b: float) -> float:
    """Counterclockwise angular distance from a to b, in [0, 2*pi)."""
    return wrap_angle(b - a)


@dataclass(frozen=True)
class BoundaryPoint:
    edge_index: int
    t: float
    point: Point

    @property
    def x(self) -> float:
        return self.point[0]

    @property
    def y(self) -> float:
        return self.point[1]


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices in counterclockwise order.

    Edge ``i`` runs from ``vertices[i]`` to ``vertices[(i + 1) % n]``.
    """

    vertices: tuple[Point, ...]
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __init__(self, vertices: Sequence[Sequence[float]]):
        verts = tuple((float(x), float(y)) for x, y in vertices)
        object.__setattr__(self, "vertices", verts)
        self._validate()
        v = np.asarray(verts, dtype=float)
        object.__setattr__(self, "_arrays", (v, np.roll(v, -1, axis=0)))

    def _validate(self) -> None:
        v = self.vertices
        n = len(v)
        if n < 3:
            raise InvalidPolygon(f"polygon needs at least 3 vertices, got {n}")
        for x, y in v:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidPolygon("vertex coordinates must be finite")
        for i in range(n):
            ax, ay = v[i]
            bx, by = v[(i + 1) % n]
            cx, cy = v[(i + 2) % n]
            if math.hypot(bx - ax, by - ay) < 1e-12:
                raise InvalidPolygon(f"repeated vertex at index {(i + 1) % n}")
            cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if not cross > 0.0:
                raise InvalidPolygon(
                    f"not strictly convex counterclockwise at vertex {(i + 1) % n}"
                )
        # Local convexity everywhere still allows a star that winds twice.
        winding = 0.0
        for i in range(n):
            ax, ay = v[i]
            bx, by = v[(i + 1) % n]
            cx, cy = v[(i + 2) % n]
            winding += math.atan2(
                (bx - ax) * (cy - by) - (by - ay) * (cx - bx),
                (bx - ax) * (cx - bx) + (by - ay) * (cy - by),
            )
        if abs(winding - TWO_PI) > 1e-6:
            raise InvalidPolygon("polygon boundary winds more than once")

    @classmethod
    def regular(cls, n: int, radius: float = 1.0, center: Point = (0.0, 0.0),
                rotation: float = 0.0) -> "ConvexPolygon":
        cx, cy = center
        return cls([
            (cx + radius * math.cos(rotation + TWO_PI * k / n),
             cy + radius * math.sin(rotation + TWO_PI * k / n))
            for k in range(n)
        ])

    @classmethod
    def rectangle(cls, width: float, height: float,
                  center: Point = (0.0, 0.0)) -> "ConvexPolygon":
        cx, cy = center
        w, h = width / 2.0, height / 2.0
        return cls([(cx - w, cy - h), (cx + w, cy - h), (cx + w, cy + h), (cx - w, cy + h)])

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> Point:
        return self.vertices[i % self.n]

    def edge(self, i: int) -> tuple[Point, Point]:
        return self.vertex(i), self.vertex(i + 1)

    @cached_property
    def edge_lengths(self) -> tuple[float, ...]:
        return tuple(math.dist(*self.edge(i)) for i in range(self.n))

    @cached_property
    def cumulative_lengths(self) -> tuple[float, ...]:
        """Arclength at the start of each edge (first entry 0)."""
        out, s = [], 0.0
        for length in self.edge_lengths:
            out.append(s)
            s += length
        return tuple(out)

    @cached_property
    def perimeter(self) -> float:
        return math.fsum(self.edge_lengths)

    @cached_property
    def _edge_lines(self) -> tuple[tuple[float, float, float], ...]:
        # Outward unit normal (nx, ny) and offset c, so interior is nx*x + ny*y < c.
        lines = []
        for (ax, ay), (bx, by) in (self.edge(i) for i in range(self.n)):
            ex, ey = bx - ax, by - ay
            length = math.hypot(ex, ey)
            nx, ny = ey / length, -ex / length
            lines.append((nx, ny, nx * ax + ny * ay))
        return tuple(lines)

    def edge_distances(self, p: Point) -> list[float]:
        """Signed distance from p to each edge line, positive inside."""
        x, y = p
        return [c - (nx * x + ny * y) for nx, ny, c in self._edge_lines]

    def contains_strictly(self, p: Point, tol: float = 1e-12) -> bool:
        return min(self.edge_distances(p)) > tol

    def point_on_edge(self, i: int, t: float) -> BoundaryPoint:
        i %= self.n
        (ax, ay), (bx, by) = self.edge(i)
        return BoundaryPoint(i, t, ((1.0 - t) * ax + t * bx, (1.0 - t) * ay + t * by))

    def point_at_arclength(self, s: float) -> BoundaryPoint:
        s = math.fmod(s, self.perimeter)
        if s < 0.0:
            s += self.perimeter
        cum = self.cumulative_lengths
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), self.n - 1)
        t = (s - cum[i]) / self.edge_lengths[i]
        return self.point_on_edge(i, min(max(t, 0.0), 1.0))

    def arclength(self, p: BoundaryPoint) -> float:
        """Arclength position of p in [0, L), measured ccw from vertex 0."""
        s = self.cumulative_lengths[p.edge_index] + p.t * self.edge_lengths[p.edge_index]
        return s if s < self.perimeter else s - self.perimeter

    def locate(self, p: Point, tol: float = 1e-9) -> BoundaryPoint:
        """Snap a 2-D point lying on the boundary to a BoundaryPoint."""
        best = None
        for i in range(self.n):
            (ax, ay), (bx, by) = self.edge(i)
            ex, ey = bx - ax, by - ay
            t = ((p[0] - ax) * ex + (p[1] - ay) * ey) / (ex * ex + ey * ey)
            t = min(max(t, 0.0), 1.0)
            q = self.point_on_edge(i, t)
            d = math.dist(q.point, p)
            if best is None or d < best[0]:
                best = (d, q)
        if best[0] > tol:
            raise GeometryError(f"point {p} is {best[0]:.3g} m off the boundary")
        return best[1]


def _require_interior(o: Point, poly: ConvexPolygon) -> None:
    if not poly.contains_strictly(o):
        raise CenterOutsidePolygon(f"center {o} is not strictly inside the polygon")


def project_to_circle(p: BoundaryPoint | Point, o: Point,
                      poly: ConvexPolygon | None = None) -> float:
    """Angle of the unit vector from o to p, in (-pi, pi]."""
    if poly is not None:
        _require_interior(o, poly)
    x, y = p.point if isinstance(p, BoundaryPoint) else p
    dx, dy = x - o[0], y - o[1]
    if math.hypot(dx, dy) < 1e-12:
        raise DegeneratePoint("boundary point coincides with the center")
    return math.atan2(dy, dx)


def ray_exit(poly: ConvexPolygon, o: Point, theta: float) -> BoundaryPoint:
    """Boundary point hit by the ray from interior point o at angle theta (no checks)."""
    dx, dy = math.cos(theta), math.sin(theta)
    ox, oy = o
    best_i, best_s = -1, math.inf
    for i, (nx, ny, c) in enumerate(poly._edge_lines):
        denom = nx * dx + ny * dy
        if denom > 1e-15:
            s = (c - (nx * ox + ny * oy)) / denom
            if s < best_s:
                best_i, best_s = i, s
    (ax, ay), (bx, by) = poly.edge(best_i)
    px, py = ox + best_s * dx, oy + best_s * dy
    ex, ey = bx - ax, by - ay
    t = ((px - ax) * ex + (py - ay) * ey) / (ex * ex + ey * ey)
    if t <= 0.0:
        return BoundaryPoint(best_i, 0.0, (ax, ay))
    if t >= 1.0:
        return BoundaryPoint(best_i, 1.0, (bx, by))
    return BoundaryPoint(best_i, t, (px, py))


def circle_to_boundary(theta: float, o: Point, poly: ConvexPolygon) -> BoundaryPoint:
    """Inverse of ``project_to_circle``: where the ray at angle theta leaves the polygon."""
    _require_interior(o, poly)
    return ray_exit(poly, o, theta)


def perimeter(poly: ConvexPolygon) -> float:
    return poly.perimeter


def inscribed_circle(poly: ConvexPolygon) -> tuple[Point, float]:
    """Chebyshev center and radius, from the 3-variable LP max r s.t. n_k.x + r <= c_k."""
    lines = np.asarray(poly._edge_lines)
    a_ub = np.column_stack([lines[:, 0], lines[:, 1], np.ones(len(lines))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=lines[:, 2],
                  bounds=[(None, None), (None, None), (0.0, None)], method="highs")
    if not res.success:
        raise GeometryError(f"inscribed circle LP failed: {res.message}")
    center = (float(res.x[0]), float(res.x[1]))
    r_in = min(poly.edge_distances(center))
    return center, r_in


def longest_inner_segment(poly: ConvexPolygon) -> float:
    """Diameter of the polygon (the longest pair of vertices, exact for convex sets)."""
    v = poly._arrays[0]
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).max())


def arc_distance(a: BoundaryPoint, b: BoundaryPoint, poly: ConvexPolygon,
                 direction: str = "ccw") -> float:
    """Length along the boundary from a to b.

    The ccw distance lies in [0, L); cw is its complement, so for a == b the
    ccw distance is 0 and the cw distance is L.
    """
    ccw = poly.arclength(b) - poly.arclength(a)
    if ccw < 0.0:
        ccw += poly.perimeter
    if ccw >= poly.perimeter:
        ccw = 0.0
    if direction == "ccw":
        return ccw
    if direction == "cw":
        return poly.perimeter - ccw
    raise ValueError(f"direction must be 'cw' or 'ccw', got {direction!r}")


def move_along_boundary(p: BoundaryPoint, distance: float, poly: ConvexPolygon,
                        direction: str = "ccw") -> BoundaryPoint:
    sign = 1.0 if direction == "ccw" else -1.0
    return poly.point_at_arclength(poly.arclength(p) + sign * distance)


def boundary_order_preserved(points: Sequence[BoundaryPoint], poly: ConvexPolygon) -> bool:
    """True if the points, in index order, wind exactly once counterclockwise."""
    n = len(points)
    s = [poly.arclength(p) for p in points]
    total = 0.0
    for i in range(n):
        gap = s[(i + 1) % n] - s[i]
        if gap <= 0.0:
            gap += poly.perimeter
        total += gap
    return abs(total - poly.perimeter) < 1e-6 * poly.perimeter and len(set(s)) == n
