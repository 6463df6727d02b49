import math

import numpy as np

from navbench.geometry import (
    clamp,
    normalize_angle,
    point_rect_distance,
    ray_circle,
    ray_rect,
    ray_segment,
)


def test_normalize_angle_wraps_into_half_open_interval():
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(3.0 * math.pi) == math.pi
    assert normalize_angle(0.0) == 0.0
    rng = np.random.default_rng(1)
    for a in rng.uniform(-50.0, 50.0, size=500):
        wrapped = normalize_angle(float(a))
        assert -math.pi < wrapped <= math.pi
        # same direction: unit vectors agree
        assert abs(math.sin(wrapped) - math.sin(a)) < 1e-9
        assert abs(math.cos(wrapped) - math.cos(a)) < 1e-9


def test_clamp():
    assert clamp(0.5, 0.0, 1.0) == 0.5
    assert clamp(-1.0, 0.0, 1.0) == 0.0
    assert clamp(2.0, 0.0, 1.0) == 1.0


def test_point_rect_distance():
    assert point_rect_distance(0.5, 0.5, 0.0, 0.0, 1.0, 1.0) == 0.0
    # 3-4-5 from the corner
    assert point_rect_distance(4.0, 5.0, 0.0, 0.0, 1.0, 1.0) == 5.0
    assert point_rect_distance(2.0, 0.5, 0.0, 0.0, 1.0, 1.0) == 1.0


def test_ray_circle_forward_hit():
    # circle at (2, 0) radius 0.5, ray along +x: entry at t = 1.5
    t = ray_circle(0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.5)
    assert t == 1.5


def test_ray_circle_miss_and_behind():
    assert ray_circle(0.0, 0.0, 1.0, 0.0, 2.0, 2.0, 0.5) is None
    assert ray_circle(0.0, 0.0, 1.0, 0.0, -2.0, 0.0, 0.5) is None


def test_ray_circle_origin_inside():
    t = ray_circle(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
    assert t == 1.0


def test_ray_segment_axis_cases():
    t = ray_segment(0.0, 0.0, 1.0, 0.0, 2.0, -1.0, 2.0, 1.0)
    assert t == 2.0
    # pointing away
    assert ray_segment(0.0, 0.0, -1.0, 0.0, 2.0, -1.0, 2.0, 1.0) is None
    # ray misses past the endpoint
    assert ray_segment(0.0, 2.0, 1.0, 0.0, 2.0, -1.0, 2.0, 1.0) is None
    # parallel
    assert ray_segment(0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0, 1.0) is None


def test_ray_segment_oblique_matches_parametric_oracle():
    # brute-force oracle: march the ray and find the crossing parameter
    ox, oy, dx, dy = 0.3, -0.2, 0.6, 0.8
    ax, ay, bx, by = 1.0, 1.5, 2.0, -0.5
    t = ray_segment(ox, oy, dx, dy, ax, ay, bx, by)
    assert t is not None
    # hit point lies on the segment line
    hx, hy = ox + t * dx, oy + t * dy
    cross = (bx - ax) * (hy - ay) - (by - ay) * (hx - ax)
    assert abs(cross) < 1e-12


def test_ray_rect_nearest_edge():
    t = ray_rect(0.0, 0.0, 1.0, 0.0, 1.0, -1.0, 3.0, 1.0)
    assert t == 1.0
    assert ray_rect(0.0, 0.0, 0.0, 1.0, 1.0, -1.0, 3.0, 1.0) is None
