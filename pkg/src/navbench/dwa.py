"""Dynamic-window local planner: reachable velocity window, constant-command
rollouts, and a normalized three-term cost minimized over a sampled grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import normalize_angle, point_rect_distance
from .world import (
    Limits,
    RobotState,
    VelocityCommand,
    World,
    advance_obstacle_poses,
    step_kinematics,
)


@dataclass(frozen=True)
class DynamicWindow:
    """Velocities reachable within one control interval under the acceleration limits."""
    v_lo: float
    v_hi: float
    w_lo: float
    w_hi: float


@dataclass(frozen=True)
class CostWeights:
    """Weights of the obstacle-distance, goal-heading, and speed terms."""
    dist: float = 1.0
    heading: float = 1.0
    velocity: float = 0.5


@dataclass(frozen=True)
class DwaConfig:
    n_v: int = 7
    n_w: int = 11
    horizon: int = 10
    weights: CostWeights = CostWeights()
    safety_margin: float = 0.0


@dataclass(frozen=True)
class TrajectoryRollout:
    """Forward simulation of one candidate command.

    poses has horizon + 1 entries with poses[0] the query state;
    min_clearance is the smallest obstacle-surface distance minus the robot
    radius over all poses, floored at 0 (+inf with no obstacles).
    """
    command: VelocityCommand
    poses: tuple[RobotState, ...]
    feasible: bool
    min_clearance: float


class NoFeasibleTrajectory(Exception):
    """No candidate command had a collision-free rollout."""


def compute_window(state: RobotState, limits: Limits, dt: float) -> DynamicWindow:
    """Reachable [v, omega] box: current velocity +- accel * dt, clipped to
    [0, v_max] and [-omega_max, omega_max]."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return DynamicWindow(
        max(0.0, state.v - limits.a_max * dt),
        min(limits.v_max, state.v + limits.a_max * dt),
        max(-limits.omega_max, state.omega - limits.alpha_max * dt),
        min(limits.omega_max, state.omega + limits.alpha_max * dt),
    )


ObstacleForecast = list[tuple[tuple[float, float, float], ...]]


def forecast_obstacles(world: World, horizon: int, dt: float) -> ObstacleForecast:
    """Circle obstacle positions (cx, cy, r) per rollout step, shared by all
    candidates of one planning call; rectangles never move."""
    spec = world.spec
    has_dynamic = any(ob.kind == "dynamic" for ob in spec.obstacles)
    poses = world.obstacles
    steps = []
    for k in range(horizon + 1):
        if k > 0 and has_dynamic:
            poses = advance_obstacle_poses(spec.obstacles, poses, dt)
        steps.append(tuple((pose.center[0], pose.center[1], ob.radius)
                           for ob, pose in zip(spec.obstacles, poses)
                           if ob.shape == "circle"))
        if not has_dynamic and k == 0:
            return [steps[0]] * (horizon + 1)
    return steps


def rollout(state: RobotState, cmd: VelocityCommand, world: World,
            horizon: int, dt: float, safety_margin: float = 0.0,
            forecast: ObstacleForecast | None = None) -> TrajectoryRollout:
    """Simulate the command held constant for ``horizon`` steps.

    Dynamic obstacles are propagated in lockstep with the robot, so
    feasibility reflects where they will be, not where they are. A pose is
    infeasible if it leaves the bounds or comes within safety_margin of
    touching an obstacle (margin 0 reproduces the contact rule exactly).
    min_clearance is tracked up to the first infeasible pose.
    """
    spec = world.spec
    r = spec.robot_radius
    w, h = spec.bounds
    if forecast is None:
        forecast = forecast_obstacles(world, horizon, dt)
    rects = tuple((ob.rect_min[0], ob.rect_min[1], ob.rect_max[0], ob.rect_max[1])
                  for ob in spec.obstacles if ob.shape == "rect")
    poses = [state]
    cur = state
    feasible = True
    clearance = math.inf
    for k in range(horizon + 1):
        if k > 0:
            cur = step_kinematics(cur, cmd, dt)
            poses.append(cur)
        if not feasible:
            continue
        x, y = cur.x, cur.y
        d = math.inf
        for cx, cy, cr in forecast[k]:
            dc = math.hypot(x - cx, y - cy) - cr
            if dc < d:
                d = dc
        for xmin, ymin, xmax, ymax in rects:
            dr = point_rect_distance(x, y, xmin, ymin, xmax, ymax)
            if dr < d:
                d = dr
        d -= r
        if d < clearance:
            clearance = d
        if (x - r <= 0.0 or x + r >= w or y - r <= 0.0 or y + r >= h
                or d <= safety_margin):
            feasible = False
    return TrajectoryRollout(cmd, tuple(poses), feasible, max(0.0, clearance))


def cost_terms(traj: TrajectoryRollout, world: World) -> tuple[float, float, float]:
    """Raw (dist, heading, velocity) costs for one feasible rollout.

    dist is inverse clearance 1 / (clearance + 0.1); heading is the absolute
    angle between the final heading and the bearing to the goal; velocity is
    the shortfall below top speed.
    """
    if not traj.feasible:
        raise ValueError("cost_terms requires a feasible rollout")
    dist_raw = 1.0 / (traj.min_clearance + 0.1)
    end = traj.poses[-1]
    gx, gy = world.spec.goal
    heading_raw = abs(normalize_angle(math.atan2(gy - end.y, gx - end.x) - end.theta))
    vel_raw = world.spec.limits.v_max - traj.command.v
    return dist_raw, heading_raw, vel_raw


def total_cost(candidates: Sequence[tuple[float, float, float]],
               weights: CostWeights) -> list[float]:
    """Weighted sum of per-term sum-normalized costs across the candidate set.

    Each raw term is divided by its sum over the candidates (a term summing
    to zero contributes zero everywhere), keeping the three terms comparable
    regardless of their natural scales.
    """
    if not candidates:
        raise NoFeasibleTrajectory("no feasible candidates to score")
    sums = [0.0, 0.0, 0.0]
    for terms in candidates:
        for k in range(3):
            sums[k] += terms[k]
    w = (weights.dist, weights.heading, weights.velocity)
    costs = []
    for terms in candidates:
        g = 0.0
        for k in range(3):
            if sums[k] > 0.0:
                g += w[k] * (terms[k] / sums[k])
        costs.append(g)
    return costs


def _axis_samples(lo: float, hi: float, n: int) -> list[float]:
    # endpoints pinned exactly so sampled commands never drift outside the window
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo] + [lo + i * step for i in range(1, n - 1)] + [hi]


def window_commands(window: DynamicWindow, n_v: int, n_w: int) -> list[VelocityCommand]:
    """Uniform n_v x n_w grid over the window, v-major order."""
    return [VelocityCommand(v, w)
            for v in _axis_samples(window.v_lo, window.v_hi, n_v)
            for w in _axis_samples(window.w_lo, window.w_hi, n_w)]


def plan_dwa(state: RobotState, world: World, config: DwaConfig) -> VelocityCommand:
    """Best command over the sampled window; (0, w_hi) recovery when boxed in.

    Infeasible rollouts are pruned before scoring. Ties are broken by lower
    |omega|, then higher v, then grid order.
    """
    spec = world.spec
    window = compute_window(state, spec.limits, spec.dt)
    forecast = forecast_obstacles(world, config.horizon, spec.dt)
    feasible: list[tuple[int, TrajectoryRollout]] = []
    for idx, cmd in enumerate(window_commands(window, config.n_v, config.n_w)):
        ro = rollout(state, cmd, world, config.horizon, spec.dt, config.safety_margin,
                     forecast=forecast)
        if ro.feasible:
            feasible.append((idx, ro))
    if not feasible:
        return VelocityCommand(0.0, window.w_hi)
    costs = total_cost([cost_terms(ro, world) for _, ro in feasible], config.weights)
    best = min(
        range(len(feasible)),
        key=lambda j: (costs[j], abs(feasible[j][1].command.omega),
                       -feasible[j][1].command.v, feasible[j][0]),
    )
    return feasible[best][1].command
