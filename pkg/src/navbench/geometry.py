"""Scalar 2D geometry: angle wrapping, distances, ray intersections."""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def point_rect_distance(px: float, py: float, xmin: float, ymin: float,
                        xmax: float, ymax: float) -> float:
    """Distance from a point to a solid axis-aligned rectangle (0 inside)."""
    dx = max(xmin - px, 0.0, px - xmax)
    dy = max(ymin - py, 0.0, py - ymax)
    return math.hypot(dx, dy)


def ray_circle(ox: float, oy: float, dx: float, dy: float,
               cx: float, cy: float, radius: float) -> float | None:
    """Smallest t >= 0 with (ox,oy) + t*(dx,dy) on the circle, or None.

    Solves |o + t*d - c|^2 = r^2, a quadratic in t:
    |d|^2 t^2 + 2 (o-c).d t + |o-c|^2 - r^2 = 0
    """
    fx = ox - cx
    fy = oy - cy
    a = dx * dx + dy * dy
    if a == 0.0:
        return None
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    t = (-b - root) / (2.0 * a)
    if t >= 0.0:
        return t
    t = (-b + root) / (2.0 * a)  # origin inside the circle
    if t >= 0.0:
        return t
    return None


def ray_segment(ox: float, oy: float, dx: float, dy: float,
                ax: float, ay: float, bx: float, by: float) -> float | None:
    """Smallest t >= 0 where the ray crosses segment AB, or None.

    Solves o + t*d = a + u*(b-a) for (t, u) with u in [0, 1]; rays parallel
    to the segment report no hit (a graze along the segment is picked up by
    the adjoining geometry instead).
    """
    ex = bx - ax
    ey = by - ay
    denom = ex * dy - ey * dx
    if denom == 0.0:
        return None
    rx = ax - ox
    ry = ay - oy
    t = (ex * ry - ey * rx) / denom
    u = (dx * ry - dy * rx) / denom
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return t
    return None


def ray_rect(ox: float, oy: float, dx: float, dy: float,
             xmin: float, ymin: float, xmax: float, ymax: float) -> float | None:
    """Nearest non-negative ray hit on the rectangle outline, or None."""
    best: float | None = None
    edges = (
        (xmin, ymin, xmax, ymin),
        (xmax, ymin, xmax, ymax),
        (xmax, ymax, xmin, ymax),
        (xmin, ymax, xmin, ymin),
    )
    for ax, ay, bx, by in edges:
        t = ray_segment(ox, oy, dx, dy, ax, ay, bx, by)
        if t is not None and (best is None or t < best):
            best = t
    return best
