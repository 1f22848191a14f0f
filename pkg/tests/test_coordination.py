import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sttrack.coordination import (
    ControlOutput,
    NeighborRecord,
    OrderViolated,
    RobotLocalState,
    TriggerReason,
    constant_control,
    control,
    guaranteed_midpoint,
    guaranteed_segment,
    order_holds,
    plan,
    prediction_interval,
    saturated_speed,
    trigger_check,
    ubd,
    unwrap_neighbors,
    voronoi_midpoint,
)

from oracles import exact_voronoi_segment

W = math.pi / 180
DT = 0.1


def state(theta, prev, nxt, tp=0.0, tn=0.0, sigma=0.0, w=W, tight=False):
    return RobotLocalState(0, theta, NeighborRecord(prev, tp), NeighborRecord(nxt, tn),
                           sigma, w, DT, tight)


def random_state(rng, tight=False):
    """Random record configuration that satisfies the order condition."""
    while True:
        th = rng.uniform(-math.pi, math.pi)
        gp, gn = rng.uniform(0.05, 2.5, size=2)
        tp, tn = rng.uniform(0.0, 60.0, size=2)
        s = state(th, th - gp, th + gn, tp, tn, tight=tight)
        if order_holds(s):
            return s


def test_prediction_interval():
    iv = prediction_interval(NeighborRecord(1.0, 2.0), 0.1)
    assert (iv.lo, iv.hi) == pytest.approx((0.8, 1.2))
    assert iv.contains(1.19) and not iv.contains(1.21)
    assert prediction_interval(NeighborRecord(1.0, 0.0), 0.1).width == 0.0


def test_gvs_fresh_records_is_voronoi():
    lo, hi = guaranteed_segment(state(0.0, -1.0, 1.0))
    assert (lo, hi) == pytest.approx((-0.5, 0.5))


def test_gvs_shrinks_with_staleness():
    lo, hi = guaranteed_segment(state(0.0, -1.0, 1.0, tp=10.0, tn=10.0, w=0.01))
    assert (lo, hi) == pytest.approx((-0.45, 0.45))


def test_midpoint_uses_records_only():
    s = state(0.2, -1.0, 1.4, tp=5.0, tn=1.0)
    assert guaranteed_midpoint(s) == pytest.approx((1.4 + 0.4 - 1.0) / 4)


def test_ubd_forms():
    s = state(0.0, -1.0, 1.0, tp=4.0, tn=2.0)
    assert ubd(s) == pytest.approx(W * 4.0 / 2)
    tight = state(0.0, -1.0, 1.0, tp=4.0, tn=2.0, tight=True)
    assert ubd(tight) == pytest.approx(W * 6.0 / 4)
    assert ubd(tight) <= ubd(s)


def test_unwrap_across_pi():
    prv, th, nxt = unwrap_neighbors(state(3.0, 2.5, -3.0))
    assert prv < th < nxt
    assert nxt == pytest.approx(-3.0 + 2 * math.pi)


def test_order_guard():
    s = state(0.0, -0.01, 0.01, tp=1.0, tn=1.0, w=0.02)
    assert not order_holds(s)
    with pytest.raises(OrderViolated):
        control(s)
    out = plan(s)
    assert out.trigger_requested and out.trigger_reason is TriggerReason.ORDER_RISK
    assert out.angular_velocity == 0.0


def test_saturated_speed_regimes():
    assert saturated_speed(1.0, 0.1, W, DT) == W
    assert saturated_speed(0.05, 0.1, W, DT) == 0.0
    d = 0.1 + 0.5 * W * DT
    assert saturated_speed(d, 0.1, W, DT) == pytest.approx(0.5 * W)


def test_control_never_overshoots():
    s = state(0.0, -1.0, 1.0 + 1e-4, tp=0.0, tn=0.0)
    out = control(s)
    g = guaranteed_midpoint(s)
    assert 0.0 < out.angular_velocity * DT <= g + 1e-15


def test_uniform_fresh_is_fixed_point():
    n = 6
    s = state(0.0, -2 * math.pi / n, 2 * math.pi / n, sigma=0.05)
    out = control(s)
    assert out == ControlOutput(0.0, False, TriggerReason.NONE)


def test_sigma_triggers_only_when_ubd_reaches_it():
    s_fresh = state(0.0, -1.0, 1.0, tp=0.1, tn=0.1, sigma=0.05)
    assert not trigger_check(s_fresh, 0.0)[0]
    stale = state(0.0, -1.0, 1.0, tp=6.0, tn=6.0, sigma=0.05)  # ubd = 0.0524
    fire, reason = trigger_check(stale, 0.0)
    assert fire and reason is TriggerReason.UBD_VIOLATION


def test_lookahead_order_trigger():
    # Next neighbor's set edge reaches theta' within one more step.
    w = 0.1
    s = state(0.0, -1.0, 0.2, tp=0.0, tn=1.95, w=w)
    assert order_holds(s)
    fire, reason = trigger_check(s, 0.0)
    assert fire and reason is TriggerReason.ORDER_RISK


def test_voronoi_midpoint_and_constant_control():
    assert voronoi_midpoint(0.0, math.pi / 2, math.pi) == pytest.approx(math.pi / 2)
    assert voronoi_midpoint(3.0, -3.0, -2.0) == pytest.approx((3.0 - 2 * math.pi - 6.0 - 2.0) / 4)
    u = constant_control(-1.0, 0.0, 2.0, W, DT)
    assert u == W
    assert constant_control(-1.0, 0.0, 1.0, W, DT) == 0.0


def test_gvs_containment_monte_carlo():
    """Guaranteed arc inside the true Voronoi arc for every admissible neighbor."""
    rng = np.random.default_rng(11)
    for _ in range(2000):
        s = random_state(rng)
        prv, th, nxt = unwrap_neighbors(s)
        lo, hi = guaranteed_segment(s)
        true_p = prv + rng.uniform(-1, 1) * W * s.prev.tau
        true_n = nxt + rng.uniform(-1, 1) * W * s.next.tau
        vlo, vhi = exact_voronoi_segment(true_p, th, true_n)
        assert vlo <= lo + 1e-12 and hi <= vhi + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_midpoint_error_within_ubd(seed, tight):
    rng = np.random.default_rng(seed)
    s = random_state(rng, tight)
    prv, th, nxt = unwrap_neighbors(s)
    true_p = prv + rng.choice([-1.0, 1.0, rng.uniform(-1, 1)]) * W * s.prev.tau
    true_n = nxt + rng.choice([-1.0, 1.0, rng.uniform(-1, 1)]) * W * s.next.tau
    v = 0.25 * (true_p + 2 * th + true_n)
    assert abs(v - guaranteed_midpoint(s)) <= ubd(s) + 1e-12


def test_step_never_moves_away_from_true_midpoint():
    """If the post-step distance to gV exceeds ubd, the robot gets no farther from V."""
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(5000):
        s = random_state(rng)
        out = control(s)
        th2 = s.theta + out.angular_velocity * DT
        g = guaranteed_midpoint(s)
        if abs(th2 - g) <= ubd(s):
            continue
        prv, th, nxt = unwrap_neighbors(s)
        true_p = prv + rng.uniform(-1, 1) * W * s.prev.tau
        true_n = nxt + rng.uniform(-1, 1) * W * s.next.tau
        v_before = 0.25 * (true_p + 2 * th + true_n)
        v_after = 0.25 * (true_p + 2 * th2 + true_n)
        assert abs(th2 - v_after) <= abs(th - v_before) + 1e-12
        checked += 1
    assert checked > 1000
