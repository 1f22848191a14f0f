"""Independent brute-force references used by the tests.

Nothing here imports the closed forms it checks; the omega oracle works on
dense discretizations with vectorized atan2.
"""

from __future__ import annotations

import math

import numpy as np


def _angles(o, pts):
    return np.arctan2(pts[:, 1] - o[1], pts[:, 0] - o[0])


def _span(o, p, q):
    """Unsigned angle at o between rows of p and q."""
    d = _angles(o, q) - _angles(o, p)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return np.abs(d)


def edge_window_max(o, a, b, d, steps_per_d=10_000):
    """Largest angle subtended at o by any length-d window sliding along edge a->b."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    length = float(np.linalg.norm(b - a))
    u = (b - a) / length
    h = d / steps_per_d
    s = np.arange(0.0, length - d + 0.5 * h, h)
    s = np.append(s[s <= length - d], length - d)
    p = a + s[:, None] * u
    q = a + (s + d)[:, None] * u
    return float(_span(o, p, q).max())


def foot_inside(o, a, b):
    a, b, o = (np.asarray(v, float) for v in (a, b, o))
    e = b - a
    t = float(np.dot(o - a, e) / np.dot(e, e))
    return 0.0 <= t <= 1.0


def vertex_sweep_max(o, prev_v, v, next_v, d_eff, samples=10_000):
    """Largest angle over splits d1 + d2 = d_eff of a path crossing vertex v."""
    prev_v, v, next_v = (np.asarray(x, float) for x in (prev_v, v, next_v))
    u1 = (prev_v - v) / np.linalg.norm(prev_v - v)
    u2 = (next_v - v) / np.linalg.norm(next_v - v)
    d1 = np.linspace(0.0, d_eff, samples + 1)
    p = v + d1[:, None] * u1
    q = v + (d_eff - d1)[:, None] * u2
    return float(_span(o, p, q).max())


def brute_omega(vertices, o, v_max, omega_ro, dt):
    """(case1, case2, case3) in rad/s, inf where a case has no members."""
    vs = [tuple(map(float, p)) for p in vertices]
    n = len(vs)
    d = v_max * dt
    c1, c2, c3 = [], [], []
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        val = edge_window_max(o, a, b, d)
        (c1 if foot_inside(o, a, b) else c2).append(val)
    for i in range(n):
        pv, v, nv = vs[i - 1], vs[i], vs[(i + 1) % n]
        h_in = math.atan2(v[1] - pv[1], v[0] - pv[0])
        h_out = math.atan2(nv[1] - v[1], nv[0] - v[0])
        ext = (h_out - h_in) % (2 * math.pi)
        dwell = ext / omega_ro
        if dwell > dt:
            continue
        c3.append(vertex_sweep_max(o, pv, v, nv, v_max * (dt - dwell)))
    out = tuple(min(c) / dt if c else math.inf for c in (c1, c2, c3))
    return out


def random_convex_polygon(rng, n_min=3, n_max=9, scale=1.0):
    """Convex hull of random points, counterclockwise, with no tiny edges."""
    from scipy.spatial import ConvexHull

    while True:
        pts = rng.normal(size=(int(rng.integers(n_min + 3, 3 * n_max)), 2)) * scale
        hull = ConvexHull(pts)
        v = pts[hull.vertices]
        if not n_min <= len(v) <= n_max:
            continue
        edges = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if edges.min() < 0.05 * scale:
            continue
        return [tuple(map(float, p)) for p in v]


def random_interior_point(rng, vertices, margin=0.1):
    v = np.asarray(vertices)
    w = rng.dirichlet(np.ones(len(v)))
    c = v.mean(axis=0)
    p = w @ v
    return tuple(map(float, c + (1 - margin) * (p - c)))


def exact_voronoi_segment(prev, theta, nxt):
    """[lo, hi] of the Voronoi arc on the real line, neighbors already unwrapped."""
    return 0.5 * (prev + theta), 0.5 * (theta + nxt)
