"""Self-triggered midpoint coordination on the circle around the target.

Every robot keeps, for each of its two neighbors, the last angle it heard
and how long ago it heard it. From that it bounds where the neighbor can be
now, moves toward the midpoint of the arc it is guaranteed to own, and asks
for fresh information only when the bound gets too loose to keep making
progress or when an order swap becomes possible.

Angles are plain floats in radians. Before any midpoint arithmetic the
neighbor angles are unwrapped around the robot's own angle so that
``prev < theta < next`` holds on the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import TWO_PI, angle_diff, wrap_angle


class OrderViolated(RuntimeError):
    """The counterclockwise order prev < self < next cannot be certified."""


class TriggerReason(str, Enum):
    NONE = "none"
    UBD_VIOLATION = "ubd_violation"
    ORDER_RISK = "order_risk"


@dataclass
class NeighborRecord:
    angle: float
    tau: float = 0.0

    def __post_init__(self):
        if self.tau < 0.0:
            raise ValueError("elapsed time tau must be nonnegative")


@dataclass(frozen=True)
class PredictionInterval:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, angle: float) -> bool:
        d = angle_diff(angle, self.center)
        return abs(d) <= 0.5 * self.width + 1e-12


@dataclass(frozen=True)
class RobotLocalState:
    index: int
    theta: float
    prev: NeighborRecord
    next: NeighborRecord
    sigma: float
    omega_max: float
    dt: float
    tight_ubd: bool = False


@dataclass(frozen=True)
class ControlOutput:
    angular_velocity: float
    trigger_requested: bool = False
    trigger_reason: TriggerReason = TriggerReason.NONE


def prediction_interval(rec: NeighborRecord, omega_max: float) -> PredictionInterval:
    phi = omega_max * rec.tau
    return PredictionInterval(rec.angle - phi, rec.angle + phi)


def unwrap_neighbors(state: RobotLocalState) -> tuple[float, float, float]:
    """(prev, theta, next) on the real line with prev <= theta <= next."""
    th = state.theta
    nxt = th + wrap_angle(state.next.angle - th)
    prv = th - wrap_angle(th - state.prev.angle)
    return prv, th, nxt


def order_holds(state: RobotLocalState, theta: float | None = None,
                lookahead: float = 0.0) -> bool:
    """Order condition with prediction sets grown by ``lookahead`` seconds."""
    prv, th, nxt = unwrap_neighbors(state)
    if theta is not None:
        th = theta
    w = state.omega_max
    return (nxt - w * (state.next.tau + lookahead) > th
            > prv + w * (state.prev.tau + lookahead)
            and nxt - prv < TWO_PI)


def _checked(state: RobotLocalState) -> tuple[float, float, float]:
    prv, th, nxt = unwrap_neighbors(state)
    if not order_holds(state):
        raise OrderViolated(
            f"robot {state.index}: neighbors' prediction sets overlap its position"
        )
    return prv, th, nxt


def guaranteed_segment(state: RobotLocalState) -> tuple[float, float]:
    """Arc [lo, hi] that belongs to this robot for every admissible neighbor position."""
    prv, th, nxt = _checked(state)
    w = state.omega_max
    lo = 0.5 * (prv + w * state.prev.tau + th)
    hi = 0.5 * (th + nxt - w * state.next.tau)
    return lo, hi


def guaranteed_midpoint(state: RobotLocalState) -> float:
    prv, th, nxt = _checked(state)
    return 0.25 * (nxt + 2.0 * th + prv)


def ubd(state: RobotLocalState) -> float:
    """Upper bound on how far the true Voronoi midpoint can sit from the guaranteed one."""
    if state.tight_ubd:
        return state.omega_max * (state.prev.tau + state.next.tau) / 4.0
    return state.omega_max * max(state.prev.tau, state.next.tau) / 2.0


def saturated_speed(distance: float, bound: float, omega_max: float, dt: float) -> float:
    if distance >= bound + omega_max * dt:
        return omega_max
    if distance <= bound:
        return 0.0
    return (distance - bound) / dt


def _velocity(state: RobotLocalState) -> tuple[float, float, float]:
    """(signed angular velocity, guaranteed midpoint, ubd)."""
    g = guaranteed_midpoint(state)
    b = ubd(state)
    offset = g - state.theta
    speed = saturated_speed(abs(offset), b, state.omega_max, state.dt)
    return math.copysign(speed, offset) if speed else 0.0, g, b


def trigger_check(state: RobotLocalState, theta_next: float) -> tuple[bool, TriggerReason]:
    """Decide whether the robot must ask its neighbors for fresh angles.

    ``theta_next`` is the robot's own angle after the planned step, on the
    same unwrapped line as ``state.theta``.
    """
    if not order_holds(state, theta_next, lookahead=state.dt):
        return True, TriggerReason.ORDER_RISK
    g = guaranteed_midpoint(state)
    if ubd(state) >= max(abs(theta_next - g), state.sigma):
        return True, TriggerReason.UBD_VIOLATION
    return False, TriggerReason.NONE


def control(state: RobotLocalState) -> ControlOutput:
    """Planned angular velocity plus whether the plan needs fresh information first."""
    omega, _, _ = _velocity(state)
    fire, reason = trigger_check(state, state.theta + omega * state.dt)
    return ControlOutput(omega, fire, reason)


def plan(state: RobotLocalState) -> ControlOutput:
    """Like ``control`` but reports a broken order condition as a trigger request."""
    if not order_holds(state):
        return ControlOutput(0.0, True, TriggerReason.ORDER_RISK)
    return control(state)


def control_velocity(state: RobotLocalState) -> float:
    """Angular velocity only, for a state that is about to be applied as is."""
    return _velocity(state)[0]


def voronoi_midpoint(theta_prev: float, theta: float, theta_next: float) -> float:
    """Midpoint of the exact Voronoi arc, unwrapped around ``theta``."""
    nxt = theta + wrap_angle(theta_next - theta)
    prv = theta - wrap_angle(theta - theta_prev)
    return 0.25 * (prv + 2.0 * theta + nxt)


def constant_control(theta_prev: float, theta: float, theta_next: float,
                     omega_max: float, dt: float) -> float:
    """Baseline law: saturated motion toward the exact Voronoi midpoint."""
    offset = voronoi_midpoint(theta_prev, theta, theta_next) - theta
    speed = saturated_speed(abs(offset), 0.0, omega_max, dt)
    return math.copysign(speed, offset) if speed else 0.0
