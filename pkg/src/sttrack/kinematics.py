"""Common maximum angular speed on the unit circle from a linear speed budget on the boundary.

Three situations bound how far (in angle, seen from the target) a robot gets
in one step: staying on an edge whose perpendicular foot from the target lies
inside the edge, staying on an edge whose foot lies outside it, and crossing a
vertex, which costs in-place turning time. ``omega_max`` is the smallest of
the three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .geometry import ConvexPolygon, Point, TWO_PI, _require_interior


class InvalidBudget(ValueError):
    pass


@dataclass(frozen=True)
class SpeedBudget:
    v_max: float
    omega_ro: float
    dt: float

    def __post_init__(self):
        for name in ("v_max", "omega_ro", "dt"):
            if not getattr(self, name) > 0.0:
                raise InvalidBudget(f"{name} must be strictly positive")

    @property
    def d_max(self) -> float:
        return self.v_max * self.dt


@dataclass(frozen=True)
class OmegaBreakdown:
    case1: float
    case2: float
    case3: float

    @property
    def omega_max(self) -> float:
        return min(self.case1, self.case2, self.case3)

    @property
    def binding_case(self) -> int:
        vals = (self.case1, self.case2, self.case3)
        return vals.index(min(vals)) + 1


def validate_budget(poly: ConvexPolygon, budget: SpeedBudget) -> None:
    shortest = min(poly.edge_lengths)
    if not budget.d_max < shortest:
        raise InvalidBudget(
            f"d_max = v_max*dt = {budget.d_max:.6g} m must be shorter than the "
            f"shortest edge ({shortest:.6g} m)"
        )


def _subtended(o: Point, a: Point, b: Point) -> float:
    """Angle at o between a and b via the law of cosines."""
    ra = math.dist(o, a)
    rb = math.dist(o, b)
    c2 = (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2
    cos = (ra * ra + rb * rb - c2) / (2.0 * ra * rb)
    return math.acos(min(1.0, max(-1.0, cos)))


def _foot(o: Point, a: Point, b: Point) -> tuple[float, float, float]:
    """(t of the foot along a->b, perpendicular distance, edge length)."""
    ex, ey = b[0] - a[0], b[1] - a[1]
    length = math.hypot(ex, ey)
    t = ((o[0] - a[0]) * ex + (o[1] - a[1]) * ey) / (length * length)
    h = abs((o[0] - a[0]) * ey - (o[1] - a[1]) * ex) / length
    return t, h, length


def _along(a: Point, b: Point, s: float) -> Point:
    length = math.dist(a, b)
    return (a[0] + (b[0] - a[0]) * s / length, a[1] + (b[1] - a[1]) * s / length)


def edge_theta_case1(o: Point, a: Point, b: Point, d: float) -> float | None:
    t, h, length = _foot(o, a, b)
    if not 0.0 <= t <= 1.0:
        return None
    s_foot = t * length
    if d / 2.0 <= s_foot <= length - d / 2.0:
        return 2.0 * math.atan((d / 2.0) / h)
    # Chord cannot be centered on the foot; the best fitting window hugs the nearer end.
    start = 0.0 if s_foot < d / 2.0 else length - d
    return _subtended(o, _along(a, b, start), _along(a, b, start + d))


def edge_theta_case2(o: Point, a: Point, b: Point, d: float) -> float | None:
    t, _, length = _foot(o, a, b)
    if 0.0 <= t <= 1.0:
        return None
    at_a = _subtended(o, a, _along(a, b, d))
    at_b = _subtended(o, b, _along(a, b, length - d))
    return max(at_a, at_b)


def exterior_angle(poly: ConvexPolygon, i: int) -> float:
    """Heading change when passing vertex i."""
    ax, ay = poly.vertex(i - 1)
    vx, vy = poly.vertex(i)
    bx, by = poly.vertex(i + 1)
    h_in = math.atan2(vy - ay, vx - ax)
    h_out = math.atan2(by - vy, bx - vx)
    d = (h_out - h_in) % TWO_PI
    return d


def vertex_theta_case3(poly: ConvexPolygon, i: int, o: Point,
                       budget: SpeedBudget) -> float | None:
    ext = exterior_angle(poly, i)
    dwell = ext / budget.omega_ro
    if dwell > budget.dt:
        return None
    d_eff = budget.v_max * (budget.dt - dwell)
    if d_eff <= 0.0:
        return 0.0
    prev_v, v, next_v = poly.vertex(i - 1), poly.vertex(i), poly.vertex(i + 1)
    interior = math.pi - ext

    def theta(d1: float) -> float:
        d2 = d_eff - d1
        ps = _along(v, prev_v, d1)
        pe = _along(v, next_v, d2)
        chord2 = d1 * d1 + d2 * d2 - 2.0 * d1 * d2 * math.cos(interior)
        ra, rb = math.dist(o, ps), math.dist(o, pe)
        cos = (ra * ra + rb * rb - chord2) / (2.0 * ra * rb)
        return math.acos(min(1.0, max(-1.0, cos)))

    grid = 64
    samples = [(theta(d_eff * k / grid), k) for k in range(grid + 1)]
    best, k = max(samples)
    lo = d_eff * max(k - 1, 0) / grid
    hi = d_eff * min(k + 1, grid) / grid
    res = minimize_scalar(lambda d1: -theta(d1), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(d_eff, 1e-300)})
    return max(best, -float(res.fun))


def omega_max_case1(poly: ConvexPolygon, o: Point, budget: SpeedBudget) -> float:
    _require_interior(o, poly)
    vals = [edge_theta_case1(o, *poly.edge(i), budget.d_max) for i in range(poly.n)]
    vals = [v for v in vals if v is not None]
    return min(vals) / budget.dt if vals else math.inf


def omega_max_case2(poly: ConvexPolygon, o: Point, budget: SpeedBudget) -> float:
    _require_interior(o, poly)
    vals = [edge_theta_case2(o, *poly.edge(i), budget.d_max) for i in range(poly.n)]
    vals = [v for v in vals if v is not None]
    return min(vals) / budget.dt if vals else math.inf


def omega_max_case3(poly: ConvexPolygon, o: Point, budget: SpeedBudget) -> float:
    _require_interior(o, poly)
    vals = [vertex_theta_case3(poly, i, o, budget) for i in range(poly.n)]
    vals = [v for v in vals if v is not None]
    return min(vals) / budget.dt if vals else math.inf


def omega_max_cases(poly: ConvexPolygon, o: Point, budget: SpeedBudget) -> OmegaBreakdown:
    validate_budget(poly, budget)
    return OmegaBreakdown(
        omega_max_case1(poly, o, budget),
        omega_max_case2(poly, o, budget),
        omega_max_case3(poly, o, budget),
    )


def omega_max(poly: ConvexPolygon, o: Point, budget: SpeedBudget) -> float:
    value = omega_max_cases(poly, o, budget).omega_max
    # Every edge is either case 1 or case 2, so the min is always finite.
    assert math.isfinite(value)
    if value <= 0.0:
        raise InvalidBudget("a vertex consumes the whole time step turning; omega_max is 0")
    return value
