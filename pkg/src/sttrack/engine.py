"""Deterministic lockstep simulation of the coordination strategies.

One call to ``step`` advances every robot by one time step:

1. age every neighbor record by ``dt``;
2. take one range measurement per robot and run the estimator;
3. plan every robot's motion from the snapshot taken at the start of the step;
4. resolve triggers: a triggering robot exchanges state with both neighbors,
   both sides of each exchanged link are refreshed, and any robot whose
   records changed is re-planned (and may trigger in turn);
5. apply the final controls, move along the boundary, advance the target, log.

Records store the neighbor's last known *boundary position*; the angle is
recomputed each step around the robot's current center, so a moving center
does not masquerade as neighbor motion.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import coordination as coord
from .config import SimConfig
from .coordination import NeighborRecord, OrderViolated, RobotLocalState
from .estimation import (
    GaussianBelief,
    centralized_update,
    ekf_predict,
    ekf_update,
    fuse,
    target_step,
)
from .geometry import (
    BoundaryPoint,
    Point,
    arc_distance,
    boundary_order_preserved,
    inscribed_circle,
    ray_exit,
)
from .kinematics import omega_max as compute_omega_max
from .limited_range import chain_decomposition, clip_to_links, links
from .metrics import com_bar, convergence_threshold


@dataclass
class Record:
    pos: Point
    tau: float = 0.0


@dataclass
class Robot:
    pos: BoundaryPoint
    belief: GaussianBelief | None = None
    prev: Record | None = None
    next: Record | None = None
    com: int = 0


@dataclass
class World:
    k: int
    t: float
    robots: list[Robot]
    target: Point
    omega_max: float
    central: GaussianBelief | None = None
    rng: np.random.Generator | None = None
    cheb: Point = (0.0, 0.0)


@dataclass(frozen=True)
class StepRecord:
    k: int
    angles: tuple[float, ...]
    positions: tuple[Point, ...]
    estimates: tuple[Point, ...]
    target: Point
    triggered: tuple[bool, ...]
    messages: tuple[int, ...]
    cerr: float
    cerr_true: float
    terr: float
    chains: int = 1
    linked: tuple[bool, ...] = ()


@dataclass(frozen=True)
class TraceSummary:
    seed: int
    strategy: str
    estimator: str
    ctime: int | None
    com_bar: float
    converged: bool
    steps: int
    final_cerr: float
    mean_terr: float
    omega_max: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SimTrace:
    config: SimConfig
    omega_max: float
    records: list[StepRecord] = field(default_factory=list)
    ctime: int | None = None

    @property
    def steps(self) -> int:
        """Steps executed; record 0 is the initial state."""
        return len(self.records) - 1

    @property
    def converged(self) -> bool:
        return self.ctime is not None

    def cerr_series(self) -> list[float]:
        return [r.cerr for r in self.records]

    def terr_series(self) -> list[float]:
        return [r.terr for r in self.records]

    def com_totals(self, upto: int | None = None) -> list[int]:
        n = self.config.n_robots
        upto = self.steps if upto is None else upto
        tot = [0] * n
        for r in self.records[1:upto + 1]:
            for i, m in enumerate(r.messages):
                tot[i] += m
        return tot

    def com_bar(self) -> float:
        span = self.ctime if self.ctime is not None else self.steps
        return com_bar(self.com_totals(span), span, self.config.n_robots)

    def summary(self) -> TraceSummary:
        cfg = self.config
        terr = self.terr_series()
        return TraceSummary(
            seed=cfg.seed, strategy=cfg.strategy, estimator=cfg.estimator,
            ctime=self.ctime, com_bar=self.com_bar(), converged=self.converged,
            steps=self.steps, final_cerr=self.records[-1].cerr,
            mean_terr=float(np.mean(terr)) if terr else 0.0,
            omega_max=self.omega_max,
        )


# ---------------------------------------------------------------- setup

def _initial_positions(cfg: SimConfig, center: Point, rng: np.random.Generator) -> list[BoundaryPoint]:
    poly = cfg.polygon
    if cfg.initial_angles is not None:
        pts = [ray_exit(poly, center, a) for a in cfg.initial_angles]
    elif cfg.initial_arclengths is not None:
        pts = [poly.point_at_arclength(f * poly.perimeter) for f in cfg.initial_arclengths]
    else:
        while True:
            s = np.sort(rng.uniform(0.0, poly.perimeter, cfg.n_robots))
            gaps = np.diff(np.append(s, s[0] + poly.perimeter))
            if gaps.min() > 1e-9 * poly.perimeter:
                break
        pts = [poly.point_at_arclength(float(v)) for v in s]
    if not boundary_order_preserved(pts, poly):
        raise ValueError("initial positions must be distinct and in counterclockwise order")
    return pts


def init_world(cfg: SimConfig) -> World:
    ss = np.random.SeedSequence(cfg.seed)
    place_ss, noise_ss = ss.spawn(2)
    place_rng = np.random.default_rng(place_ss)
    target = cfg.target.position_at(0.0)
    cheb, _ = inscribed_circle(cfg.polygon)
    mean0 = cfg.initial_mean if cfg.initial_mean is not None else cheb
    center0 = target if cfg.estimator == "known_target" else mean0
    if cfg.omega_max is not None:
        w = cfg.omega_max
    else:
        w = compute_omega_max(cfg.polygon, center0, cfg.speed_budget)
    pts = _initial_positions(cfg, center0, place_rng)
    robots = [Robot(p) for p in pts]
    prior = GaussianBelief(np.asarray(mean0, dtype=float), np.asarray(cfg.initial_cov, dtype=float))
    central = None
    if cfg.estimator == "centralized_ekf":
        central = prior
    elif cfg.estimator == "decentralized_ekf_ci":
        for r in robots:
            r.belief = prior
    n = cfg.n_robots
    if cfg.strategy == "self_triggered":
        for i, r in enumerate(robots):
            r.prev = Record(robots[(i - 1) % n].pos.point)
            r.next = Record(robots[(i + 1) % n].pos.point)
    return World(0, 0.0, robots, target, w, central, np.random.default_rng(noise_ss), cheb)


# ---------------------------------------------------------------- helpers

def _safe_center(cfg: SimConfig, world: World, c: Point) -> Point:
    """Pull an estimate that wandered outside the polygon back inside."""
    poly = cfg.polygon
    if poly.contains_strictly(c, 1e-9):
        return c
    cx, cy = world.cheb
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if poly.contains_strictly((cx + mid * (c[0] - cx), cy + mid * (c[1] - cy)), 1e-9):
            lo = mid
        else:
            hi = mid
    return (cx + lo * (c[0] - cx), cy + lo * (c[1] - cy))


def _centers(cfg: SimConfig, world: World) -> list[Point]:
    n = cfg.n_robots
    if cfg.estimator == "known_target":
        return [world.target] * n
    if cfg.estimator == "centralized_ekf":
        c = _safe_center(cfg, world, world.central.point)
        return [c] * n
    return [_safe_center(cfg, world, r.belief.point) for r in world.robots]


def _angle(p: Point, c: Point) -> float:
    return math.atan2(p[1] - c[1], p[0] - c[0])


def _local_state(cfg: SimConfig, world: World, i: int, center: Point) -> RobotLocalState:
    r = world.robots[i]
    return RobotLocalState(
        index=i,
        theta=_angle(r.pos.point, center),
        prev=NeighborRecord(_angle(r.prev.pos, center), r.prev.tau),
        next=NeighborRecord(_angle(r.next.pos, center), r.next.tau),
        sigma=cfg.sigma, omega_max=world.omega_max, dt=cfg.dt, tight_ubd=cfg.tight_ubd,
    )


def _sense(cfg: SimConfig, world: World) -> None:
    """One range per robot; estimator predict/update. Noise is drawn for every robot every step."""
    if cfg.estimator == "known_target":
        return
    o = world.target
    n = cfg.n_robots
    noise = world.rng.standard_normal(n) * cfg.noise.sensor_std
    ranges: list[float | None] = []
    for i, r in enumerate(world.robots):
        d = math.dist(r.pos.point, o)
        ranges.append(d + float(noise[i]) if d <= cfg.ranges.r_s else None)
    positions = [r.pos.point for r in world.robots]
    if cfg.estimator == "centralized_ekf":
        world.central = centralized_update(world.central, ranges, positions, cfg.noise)
        return
    for r, z in zip(world.robots, ranges):
        b = ekf_predict(r.belief, cfg.noise.R)
        r.belief = ekf_update(b, z, r.pos.point, cfg.noise.q) if z is not None else b


def _fused(cfg: SimConfig, own: GaussianBelief, received: dict[str, GaussianBelief]) -> GaussianBelief:
    b = own
    for side in ("prev", "next"):
        if side in received:
            b = fuse(b, received[side], cfg.ci_criterion)
    return b


def _cerr_terms(cfg: SimConfig, world: World, centers: Sequence[Point],
                use_records: Sequence[bool]) -> tuple[float, float]:
    """(strategy Cerr, exact-Voronoi Cerr) for the current positions."""
    n = cfg.n_robots
    rs = world.robots
    total, exact = 0.0, 0.0
    for i, r in enumerate(rs):
        c = centers[i]
        th = _angle(r.pos.point, c)
        tp = _angle(rs[(i - 1) % n].pos.point, c)
        tn = _angle(rs[(i + 1) % n].pos.point, c)
        e = abs(th - coord.voronoi_midpoint(tp, th, tn))
        exact += e
        if use_records[i]:
            g = coord.voronoi_midpoint(_angle(r.prev.pos, c), th, _angle(r.next.pos, c))
            total += abs(th - g)
        else:
            total += e
    return total, exact


def _terr(cfg: SimConfig, world: World, centers: Sequence[Point]) -> float:
    if cfg.estimator == "known_target":
        return 0.0
    o = world.target
    if cfg.estimator == "centralized_ekf":
        return math.dist(world.central.point, o)
    return math.fsum(math.dist(r.belief.point, o) for r in world.robots) / cfg.n_robots


def _record(cfg: SimConfig, world: World, centers, triggered, messages, use_records,
            terr: float, linked=()) -> StepRecord:
    cerr, exact = _cerr_terms(cfg, world, centers, use_records)
    chains = 1
    if cfg.strategy == "self_triggered_limited":
        chains = len(chain_decomposition([r.pos for r in world.robots], cfg.polygon, cfg.ranges.r_c))
    return StepRecord(
        k=world.k,
        angles=tuple(_angle(r.pos.point, c) for r, c in zip(world.robots, centers)),
        positions=tuple(r.pos.point for r in world.robots),
        estimates=tuple(centers),
        target=world.target,
        triggered=tuple(triggered),
        messages=tuple(messages),
        cerr=cerr if cfg.strategy != "constant" else exact,
        cerr_true=exact,
        terr=terr,
        chains=chains,
        linked=tuple(linked),
    )


def initial_record(cfg: SimConfig, world: World) -> StepRecord:
    n = cfg.n_robots
    centers = _centers(cfg, world)
    use = [r.prev is not None and r.next is not None for r in world.robots]
    linked = links([r.pos for r in world.robots], cfg.ranges.r_c) \
        if cfg.strategy == "self_triggered_limited" else ()
    return _record(cfg, world, centers, [False] * n, [0] * n, use,
                   _terr(cfg, world, centers), linked)


# ---------------------------------------------------------------- the step

def _resolve_triggers(cfg: SimConfig, world: World, snap: list[Point], centers: list[Point],
                      eligible: Sequence[bool]) -> tuple[list[float], list[bool], list[int]]:
    """Plan, trigger, exchange and re-plan for robots running the self-triggered law.

    Returns (angular velocity, triggered, messages) per robot; entries of
    robots that are not ``eligible`` are left at zero for the caller.
    """
    n = cfg.n_robots
    rs = world.robots
    decentral = cfg.estimator == "decentralized_ekf_ci"
    own_beliefs = [r.belief for r in rs]
    received: list[dict[str, GaussianBelief]] = [{} for _ in range(n)]
    planned: list[coord.ControlOutput | None] = [None] * n
    for i in range(n):
        if eligible[i]:
            planned[i] = coord.plan(_local_state(cfg, world, i, centers[i]))
    triggered = [False] * n
    queue = [i for i in range(n) if planned[i] is not None and planned[i].trigger_requested]
    while queue:
        touched: set[int] = set()
        for i in queue:
            triggered[i] = True
            j_prev, j_next = (i - 1) % n, (i + 1) % n
            rs[i].prev = Record(snap[j_prev])
            rs[i].next = Record(snap[j_next])
            rs[j_prev].next = Record(snap[i])
            rs[j_next].prev = Record(snap[i])
            if decentral:
                received[i]["prev"] = own_beliefs[j_prev]
                received[i]["next"] = own_beliefs[j_next]
                received[j_prev]["next"] = own_beliefs[i]
                received[j_next]["prev"] = own_beliefs[i]
            touched.update((i, j_prev, j_next))
        if decentral:
            for j in touched:
                rs[j].belief = _fused(cfg, own_beliefs[j], received[j])
                centers[j] = _safe_center(cfg, world, rs[j].belief.point)
        queue = []
        for j in sorted(touched):
            if not eligible[j]:
                continue
            out = coord.plan(_local_state(cfg, world, j, centers[j]))
            planned[j] = out
            if out.trigger_requested and not triggered[j]:
                queue.append(j)
    omegas = [0.0] * n
    for i in range(n):
        if planned[i] is None:
            continue
        if triggered[i]:
            state = _local_state(cfg, world, i, centers[i])
            if not coord.order_holds(state):
                raise OrderViolated(f"robot {i} out of order even with fresh neighbor data")
            omegas[i] = coord.control_velocity(state)
        else:
            omegas[i] = planned[i].angular_velocity
    messages = [2 if t else 0 for t in triggered]
    return omegas, triggered, messages


def _cap_linear(cfg: SimConfig, omega: float, p: BoundaryPoint, c: Point) -> float:
    """Scale omega so the boundary path length of the step stays within v_max*dt."""
    if cfg.v_max is None or omega == 0.0:
        return omega
    poly, dt = cfg.polygon, cfg.dt
    limit = cfg.v_max * dt
    th = _angle(p.point, c)
    direction = "ccw" if omega > 0 else "cw"

    def length(f: float) -> float:
        q = ray_exit(poly, c, th + f * omega * dt)
        d = arc_distance(p, q, poly, direction)
        return 0.0 if d >= poly.perimeter - 1e-12 else d

    if length(1.0) <= limit:
        return omega
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if length(mid) <= limit:
            lo = mid
        else:
            hi = mid
    return omega * lo


def step(world: World, cfg: SimConfig) -> StepRecord:
    n = cfg.n_robots
    poly = cfg.polygon
    dt = cfg.dt
    rs = world.robots
    for r in rs:
        if r.prev is not None:
            r.prev.tau += dt
        if r.next is not None:
            r.next.tau += dt
    _sense(cfg, world)
    centers = _centers(cfg, world)
    snap = [r.pos.point for r in rs]
    limited = cfg.strategy == "self_triggered_limited"
    link_state: list[bool] = []

    if cfg.strategy == "constant":
        if cfg.estimator == "decentralized_ekf_ci":
            own = [r.belief for r in rs]
            for i, r in enumerate(rs):
                r.belief = _fused(cfg, own[i], {"prev": own[(i - 1) % n], "next": own[(i + 1) % n]})
            centers = _centers(cfg, world)
        omegas = []
        for i in range(n):
            c = centers[i]
            omegas.append(coord.constant_control(
                _angle(snap[(i - 1) % n], c), _angle(snap[i], c), _angle(snap[(i + 1) % n], c),
                world.omega_max, dt))
        triggered = [True] * n
        messages = [2] * n
        use_records = [False] * n
    elif not limited:
        omegas, triggered, messages = _resolve_triggers(cfg, world, snap, centers, [True] * n)
        use_records = [True] * n
    else:
        link_state = links([r.pos for r in rs], cfg.ranges.r_c)
        messages = [0] * n
        for i in range(n):
            j = (i + 1) % n
            if link_state[i] and (rs[i].next is None or rs[j].prev is None):
                rs[i].next = Record(snap[j])
                rs[j].prev = Record(snap[i])
                messages[i] += 1
                messages[j] += 1
        reach = [(link_state[(i - 1) % n], link_state[i]) for i in range(n)]
        eligible = [a and b for a, b in reach]
        omegas, triggered, trig_msgs = _resolve_triggers(cfg, world, snap, centers, eligible)
        for i in range(n):
            messages[i] += trig_msgs[i]
            if not eligible[i]:
                if reach[i][0]:
                    omegas[i] = world.omega_max
                elif reach[i][1]:
                    omegas[i] = -world.omega_max
        use_records = eligible

    for i in range(n):
        omegas[i] = _cap_linear(cfg, omegas[i], rs[i].pos, centers[i])

    if limited:
        # Sequential so each move is checked against the neighbors' latest positions.
        r_c = cfg.ranges.r_c
        for i in range(n):
            if omegas[i] == 0.0:
                continue
            anchors = []
            if link_state[(i - 1) % n]:
                anchors.append(rs[(i - 1) % n].pos.point)
            if link_state[i]:
                anchors.append(rs[(i + 1) % n].pos.point)
            th = _angle(snap[i], centers[i])
            f = clip_to_links(poly, centers[i], th, omegas[i] * dt, anchors, r_c)
            omegas[i] *= f
            rs[i].pos = ray_exit(poly, centers[i], th + omegas[i] * dt)
    else:
        for i in range(n):
            if omegas[i] != 0.0:
                th = _angle(snap[i], centers[i])
                rs[i].pos = ray_exit(poly, centers[i], th + omegas[i] * dt)

    for i in range(n):
        rs[i].com += messages[i]
    terr = _terr(cfg, world, centers)
    world.target = target_step(cfg.target, world.t, dt, poly)
    world.k += 1
    world.t = world.k * dt
    if limited:
        link_state = links([r.pos for r in rs], cfg.ranges.r_c)
    return _record(cfg, world, centers, triggered, messages, use_records, terr, link_state)


# ---------------------------------------------------------------- runs

def run(cfg: SimConfig, check_order: bool = True) -> SimTrace:
    world = init_world(cfg)
    trace = SimTrace(cfg, world.omega_max)
    rec = initial_record(cfg, world)
    trace.records.append(rec)
    thr = convergence_threshold(cfg.n_robots)
    if rec.cerr < thr:
        trace.ctime = 0
        if cfg.stop_at_convergence:
            return trace
    for _ in range(cfg.max_steps):
        rec = step(world, cfg)
        trace.records.append(rec)
        if check_order and not boundary_order_preserved([r.pos for r in world.robots], cfg.polygon):
            raise OrderViolated(f"robots changed circular order at step {world.k}")
        if trace.ctime is None and rec.cerr < thr:
            trace.ctime = world.k
            if cfg.stop_at_convergence:
                break
    return trace


def _run_summary(cfg: SimConfig) -> TraceSummary:
    return run(cfg).summary()


def run_batch(cfg: SimConfig | Sequence[SimConfig], seeds: Iterable[int] | None = None,
              workers: int = 1) -> list[TraceSummary]:
    """Independent trials, one per seed (or per config), returned in input order."""
    if isinstance(cfg, SimConfig):
        configs = [cfg.with_seed(s) for s in (seeds if seeds is not None else [cfg.seed])]
    else:
        configs = list(cfg)
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_summary, configs))
    return [_run_summary(c) for c in configs]
