import math

import pytest

from sttrack.coordination import NeighborRecord, RobotLocalState
from sttrack.geometry import ConvexPolygon, ray_exit
from sttrack.limited_range import (
    Reach,
    RangeConfig,
    chain_decomposition,
    clip_to_links,
    links,
    modified_control,
    necessary_bounds,
    reachable_neighbors,
    sufficient_bounds,
)

UNIT = ConvexPolygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])
W = math.pi / 180


def uniform(poly, n, center=(0.0, 0.0), phase=0.1):
    return [ray_exit(poly, center, phase + 2 * math.pi * k / n) for k in range(n)]


def test_bounds_square():
    r_c, r_s = necessary_bounds(UNIT, 4)
    assert r_c == pytest.approx(math.sqrt(2) / 2)
    assert r_s == pytest.approx(0.5)
    assert sufficient_bounds(UNIT, 4) == pytest.approx((1.0, math.sqrt(2)))
    with pytest.raises(ValueError):
        necessary_bounds(UNIT, 1)


def test_range_config():
    assert not RangeConfig().limited
    assert RangeConfig(r_c=0.5).limited
    with pytest.raises(ValueError):
        RangeConfig(r_c=0.0)


def test_theorem_one_witness():
    n = 5
    pts = uniform(UNIT, n, phase=math.pi / 4)
    r_c = 0.99 * necessary_bounds(UNIT, n)[0]
    for i in range(n):
        assert reachable_neighbors(pts, i, r_c) == Reach(False, False)


def test_modified_control_cases():
    s = RobotLocalState(0, 0.0, NeighborRecord(-1.0), NeighborRecord(1.2), 0.0, W, 0.1)
    assert modified_control(s, Reach(True, True), W).angular_velocity == W
    assert modified_control(None, Reach(True, False), W).angular_velocity == W
    assert modified_control(None, Reach(False, True), W).angular_velocity == -W
    assert modified_control(None, Reach(False, False), W).angular_velocity == 0.0
    with pytest.raises(ValueError):
        modified_control(None, Reach(True, True), W)


def test_clip_keeps_anchor_in_range():
    anchor = (0.5, 0.0)
    th = math.atan2(-0.5, 0.2)
    start = ray_exit(UNIT, (0, 0), th).point
    f = clip_to_links(UNIT, (0.0, 0.0), th, -0.5, [anchor], 0.6)
    assert 0.0 < f < 1.0
    p = ray_exit(UNIT, (0, 0), th - 0.5 * f).point
    assert math.dist(p, anchor) <= 0.6
    assert math.dist(p, anchor) > 0.6 - 1e-5
    assert math.dist(start, anchor) <= 0.6
    assert clip_to_links(UNIT, (0, 0), th, 0.01, [], 0.1) == 1.0


def test_chains():
    pts = [UNIT.point_at_arclength(s) for s in (0.0, 0.3, 0.6, 2.0, 2.2)]
    ch = chain_decomposition(pts, UNIT, 0.5)
    assert links(pts, 0.5) == [True, True, False, True, False]
    assert sorted(c.members for c in ch) == [(0, 1, 2), (3, 4)]
    by = {c.members: c for c in ch}
    assert by[(0, 1, 2)].length == pytest.approx(0.6)
    assert by[(0, 1, 2)].separation == pytest.approx(1.4)
    assert by[(3, 4)].separation == pytest.approx(1.8)
    ring = chain_decomposition(uniform(UNIT, 5), UNIT, 0.8)
    assert len(ring) == 1 and ring[0].length == pytest.approx(4.0) and ring[0].separation == 0.0
