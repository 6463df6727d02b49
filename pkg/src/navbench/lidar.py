"""2D ray-cast range sensor with beams at fixed angular intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ray_circle, ray_rect, ray_segment
from .world import RobotState, World

# floor keeping every reported range strictly positive even from a pose
# already in contact (terminal frames of a collided episode)
_MIN_RANGE = 1e-9


@dataclass(frozen=True)
class SensorConfig:
    n_beams: int = 20
    fov: float = 2.0 * math.pi   # total field of view, centered on the heading
    max_range: float = 5.0


@dataclass(frozen=True)
class LidarScan:
    """Fixed-length vector of beam ranges, each in (0, max_range]."""
    ranges: np.ndarray
    max_range: float

    def min_range(self) -> float:
        return float(self.ranges.min())


def validate_sensor(sensor: SensorConfig) -> None:
    if sensor.n_beams < 1:
        raise ValueError("n_beams must be >= 1")
    if not 0.0 < sensor.fov <= 2.0 * math.pi:
        raise ValueError("fov must be in (0, 2*pi]")
    if not sensor.max_range > 0.0:
        raise ValueError("max_range must be positive")


def beam_angles(theta: float, sensor: SensorConfig) -> list[float]:
    """World-frame beam directions: theta - fov/2 .. theta + fov/2, evenly spaced."""
    n = sensor.n_beams
    if n == 1:
        return [theta]
    step = sensor.fov / (n - 1)
    return [theta - 0.5 * sensor.fov + i * step for i in range(n)]


def cast_scan(state: RobotState, world: World, sensor: SensorConfig) -> LidarScan:
    """Range to the nearest obstacle or wall along each beam, capped at max_range."""
    spec = world.spec
    w, h = spec.bounds
    walls = (
        (0.0, 0.0, w, 0.0),
        (w, 0.0, w, h),
        (w, h, 0.0, h),
        (0.0, h, 0.0, 0.0),
    )
    ox, oy = state.x, state.y
    ranges = np.empty(sensor.n_beams, dtype=float)
    for i, ang in enumerate(beam_angles(state.theta, sensor)):
        dx = math.cos(ang)
        dy = math.sin(ang)
        best = sensor.max_range
        for ob, pose in zip(spec.obstacles, world.obstacles):
            if ob.shape == "circle":
                cx, cy = pose.center
                t = ray_circle(ox, oy, dx, dy, cx, cy, ob.radius)
            else:
                t = ray_rect(ox, oy, dx, dy, ob.rect_min[0], ob.rect_min[1],
                             ob.rect_max[0], ob.rect_max[1])
            if t is not None and t < best:
                best = t
        for ax, ay, bx, by in walls:
            t = ray_segment(ox, oy, dx, dy, ax, ay, bx, by)
            if t is not None and t < best:
                best = t
        ranges[i] = best if best > _MIN_RANGE else _MIN_RANGE
    return LidarScan(ranges, sensor.max_range)
