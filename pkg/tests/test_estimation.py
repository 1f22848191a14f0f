import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sttrack.estimation import (
    DegenerateGeometry,
    GaussianBelief,
    NoiseConfig,
    TargetLeftInterior,
    TargetModel,
    centralized_update,
    covariance_intersection,
    ekf_predict,
    ekf_update,
    fuse,
    golden_section_min,
    optimize_lambda,
    target_step,
)
from sttrack.geometry import ConvexPolygon


def spd(rng, scale=1.0):
    a = rng.normal(size=(2, 2))
    return scale * (a @ a.T + 0.1 * np.eye(2))


def belief(rng):
    return GaussianBelief(rng.normal(size=2), spd(rng))


def test_predict_adds_process_noise():
    b = GaussianBelief([1.0, 2.0], np.eye(2))
    p = ekf_predict(b, 0.5 * np.eye(2))
    assert np.allclose(p.cov, 1.5 * np.eye(2))
    assert np.array_equal(p.mean, b.mean)


def test_update_along_line_of_sight():
    # Robot at origin, target believed at (2, 0); a range of 2.5 pulls x only.
    b = GaussianBelief([2.0, 0.0], np.eye(2))
    u = ekf_update(b, 2.5, (0.0, 0.0), 1.0)
    assert u.mean == pytest.approx([2.25, 0.0])
    assert u.cov == pytest.approx(np.diag([0.5, 1.0]))
    assert u.is_valid()


def test_update_matches_textbook_form():
    rng = np.random.default_rng(3)
    for _ in range(50):
        b = GaussianBelief(rng.normal(size=2) * 3, spd(rng))
        p = tuple(rng.normal(size=2) * 3 + 10)
        q = float(rng.uniform(0.01, 1.0))
        u = ekf_update(b, 9.0, p, q)
        H = (b.mean - np.asarray(p)) / np.linalg.norm(b.mean - np.asarray(p))
        K = b.cov @ H / (H @ b.cov @ H + q)
        assert u.cov == pytest.approx((np.eye(2) - np.outer(K, H)) @ b.cov, abs=1e-10)


def test_update_degenerate():
    with pytest.raises(DegenerateGeometry):
        ekf_update(GaussianBelief([1.0, 1.0], np.eye(2)), 0.0, (1.0, 1.0), 0.1)


def test_ci_identity_and_endpoints():
    rng = np.random.default_rng(17)
    for _ in range(200):
        a, b = belief(rng), belief(rng)
        lam = float(rng.uniform(0, 1))
        c = covariance_intersection(a, b, lam)
        info = lam * np.linalg.inv(a.cov) + (1 - lam) * np.linalg.inv(b.cov)
        assert np.allclose(np.linalg.inv(c.cov), info, atol=1e-10, rtol=0)
        assert c.is_valid()
    a, b = belief(rng), belief(rng)
    one, zero = covariance_intersection(a, b, 1.0), covariance_intersection(a, b, 0.0)
    assert np.array_equal(one.mean, a.mean) and np.array_equal(one.cov, a.cov)
    assert np.array_equal(zero.mean, b.mean) and np.array_equal(zero.cov, b.cov)
    with pytest.raises(ValueError):
        covariance_intersection(a, b, 1.5)


def test_ci_equal_inputs():
    rng = np.random.default_rng(1)
    a = belief(rng)
    assert optimize_lambda(a, a) == 0.5
    c = fuse(a, a)
    assert np.allclose(c.mean, a.mean) and np.allclose(c.cov, a.cov)


def test_lambda_picks_more_informative():
    a = GaussianBelief([0, 0], 0.1 * np.eye(2))
    b = GaussianBelief([1, 1], 10.0 * np.eye(2))
    assert optimize_lambda(a, b) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["trace", "det"]))
def test_lambda_minimizes_against_grid(seed, crit):
    rng = np.random.default_rng(seed)
    a, b = belief(rng), belief(rng)
    lam = optimize_lambda(a, b, crit)

    def f(l):
        c = covariance_intersection(a, b, l).cov
        return np.trace(c) if crit == "trace" else np.linalg.det(c)

    grid = min(f(x) for x in np.linspace(0, 1, 2001))
    assert f(lam) <= grid * (1 + 1e-6) + 1e-15


def test_golden_section_quadratic():
    assert golden_section_min(lambda x: (x - 0.3) ** 2, 0.0, 1.0) == pytest.approx(0.3, abs=1e-6)


def test_target_models():
    circ = TargetModel("circular", center=(0.0, 0.0), v_o=1.0, omega_o=0.6)
    assert circ.radius == pytest.approx(1 / 0.6)
    p = circ.position_at(math.pi / 0.6)
    assert p == pytest.approx((-circ.radius, 0.0))
    way = TargetModel("waypoints", v_o=1.0, waypoints=((0, 0), (1, 0), (1, 2)))
    assert way.position_at(2.0) == pytest.approx((1.0, 1.0))
    assert way.position_at(50.0) == (1, 2)
    with pytest.raises(ValueError):
        TargetModel("circular", v_o=0.0, omega_o=1.0)


def test_target_leaving_polygon_raises():
    poly = ConvexPolygon.regular(6, 1.0)
    walker = TargetModel("waypoints", v_o=1.0, waypoints=((0, 0), (5, 0)))
    with pytest.raises(TargetLeftInterior):
        target_step(walker, 0.9, 0.2, poly)


def test_noiseless_centralized_converges():
    o = np.array([0.3, -0.2])
    robots = [(3 * math.cos(a), 3 * math.sin(a)) for a in np.linspace(0, 2 * math.pi, 6, endpoint=False)]
    noise = NoiseConfig(R=1e-6 * np.eye(2), q=1e-2)
    b = GaussianBelief([1.0, 1.0], np.eye(2))
    for _ in range(300):
        b = centralized_update(b, [math.dist(p, o) for p in robots], robots, noise)
    assert np.linalg.norm(b.mean - o) < 1e-3
    skipped = centralized_update(b, [None] * 6, robots, noise)
    assert np.allclose(skipped.cov, b.cov + noise.R)
