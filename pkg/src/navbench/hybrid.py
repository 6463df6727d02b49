"""Policy/DWA fusion: observation building, action scaling, the hybrid
planner that lets the policy's command compete inside the DWA cost, and the
training reward."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dwa import (
    DwaConfig,
    TrajectoryRollout,
    compute_window,
    cost_terms,
    forecast_obstacles,
    rollout,
    total_cost,
    window_commands,
)
from .geometry import clamp, normalize_angle
from .lidar import LidarScan
from .nn import Mlp, forward
from .world import Limits, RobotState, VelocityCommand, World

# sources reported by plan_hybrid
SOURCE_POLICY = "policy"
SOURCE_DWA_FALLBACK = "dwa-fallback"
SOURCE_RECOVERY = "recovery"


@dataclass(frozen=True)
class Observation:
    """Unit-scaled policy input: beam ranges plus goal and motion summary.

    beams are ranges / max_range in (0, 1]; goal_dist is normalized by the
    world diagonal; goal_bearing_error by pi; velocities by their limits.
    """
    beams: np.ndarray
    goal_dist: float
    goal_bearing_error: float
    v_norm: float
    w_norm: float

    def vector(self) -> np.ndarray:
        return np.concatenate([
            self.beams,
            [self.goal_dist, self.goal_bearing_error, self.v_norm, self.w_norm],
        ])


@dataclass(frozen=True)
class RewardConfig:
    r_goal: float = 100.0
    r_collision: float = -100.0
    progress_scale: float = 10.0
    step_penalty: float = -0.05


def validate_reward_config(config: RewardConfig) -> None:
    if not (config.r_goal > 0.0 > config.r_collision):
        raise ValueError("need r_goal > 0 > r_collision")


def build_observation(scan: LidarScan, state: RobotState, world: World) -> Observation:
    spec = world.spec
    gx, gy = spec.goal
    diag = math.hypot(spec.bounds[0], spec.bounds[1])
    bearing = normalize_angle(math.atan2(gy - state.y, gx - state.x) - state.theta)
    return Observation(
        beams=scan.ranges / scan.max_range,
        goal_dist=math.hypot(gx - state.x, gy - state.y) / diag,
        goal_bearing_error=bearing / math.pi,
        v_norm=state.v / spec.limits.v_max,
        w_norm=state.omega / spec.limits.omega_max,
    )


def observation_dim(n_beams: int) -> int:
    return n_beams + 4


def scale_action(action, limits: Limits) -> VelocityCommand:
    """Map [-1, 1]^2 onto the robot's command space.

    v spans [0, v_max] (no reverse), omega spans [-omega_max, omega_max].
    """
    a0 = clamp(float(action[0]), -1.0, 1.0)
    a1 = clamp(float(action[1]), -1.0, 1.0)
    return VelocityCommand(0.5 * (a0 + 1.0) * limits.v_max, a1 * limits.omega_max)


def compute_reward(prev_state: RobotState, new_state: RobotState, world: World,
                   outcome: str, config: RewardConfig) -> float:
    """Terminal bonus/penalty, otherwise goal progress plus a step penalty."""
    if outcome == "collision":
        return config.r_collision
    if outcome == "goal":
        return config.r_goal
    gx, gy = world.spec.goal
    d_prev = math.hypot(prev_state.x - gx, prev_state.y - gy)
    d_new = math.hypot(new_state.x - gx, new_state.y - gy)
    return config.progress_scale * (d_prev - d_new) + config.step_penalty


def plan_hybrid(state: RobotState, world: World, scan: LidarScan, actor: Mlp,
                dwa_config: DwaConfig) -> tuple[VelocityCommand, str]:
    """Best of the policy command and the DWA grid under the shared cost.

    The actor's scaled command is clamped into the dynamic window and rolled
    out next to the grid candidates; the cheapest feasible rollout wins,
    with ties going to the policy. An infeasible policy command falls back
    to the best grid candidate, and when nothing is feasible the planner
    spins in place.
    """
    spec = world.spec
    window = compute_window(state, spec.limits, spec.dt)
    obs = build_observation(scan, state, world)
    action, _ = forward(actor, obs.vector())
    raw = scale_action(action, spec.limits)
    policy_cmd = VelocityCommand(clamp(raw.v, window.v_lo, window.v_hi),
                                 clamp(raw.omega, window.w_lo, window.w_hi))

    candidates = [policy_cmd] + window_commands(window, dwa_config.n_v, dwa_config.n_w)
    forecast = forecast_obstacles(world, dwa_config.horizon, spec.dt)
    feasible: list[tuple[int, TrajectoryRollout]] = []
    for idx, cmd in enumerate(candidates):
        ro = rollout(state, cmd, world, dwa_config.horizon, spec.dt,
                     dwa_config.safety_margin, forecast=forecast)
        if ro.feasible:
            feasible.append((idx, ro))
    if not feasible:
        return VelocityCommand(0.0, window.w_hi), SOURCE_RECOVERY

    costs = total_cost([cost_terms(ro, world) for _, ro in feasible], dwa_config.weights)
    best_cost = min(costs)
    if feasible[0][0] == 0 and costs[0] == best_cost:
        return policy_cmd, SOURCE_POLICY
    best = min(
        (j for j in range(len(feasible)) if feasible[j][0] != 0),
        key=lambda j: (costs[j], abs(feasible[j][1].command.omega),
                       -feasible[j][1].command.v, feasible[j][0]),
    )
    return feasible[best][1].command, SOURCE_DWA_FALLBACK
