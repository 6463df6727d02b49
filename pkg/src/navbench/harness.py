"""Seeded training and evaluation loops, paired planner comparison, and CSV
emission mirroring the benchmark's collision / time / path-length schema."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .dwa import plan_dwa
from .hybrid import build_observation, compute_reward, observation_dim, plan_hybrid, scale_action
from .lidar import cast_scan
from .nn import Mlp
from .scenario import Scenario
from .td3 import (
    EpsilonState,
    ReplayBuffer,
    Td3Agent,
    decay_epsilon,
    load_checkpoint,
    save_checkpoint,
    select_action,
    update_step,
)
from .world import (
    RobotState,
    World,
    WorldSpec,
    check_collision,
    goal_reached,
    min_obstacle_distance,
    polyline_cycle_length,
)

PLANNERS = ("dwa", "td3-dwa")
PLANNER_LABELS = {"dwa": "DWA", "td3-dwa": "TD3-DWA"}

# purpose indices for deriving independent generator streams from one seed
_STREAMS = {
    "init": 0,
    "explore": 1,
    "smoothing": 2,
    "start_pose": 3,
    "obstacle_phase": 4,
}

_POSE_CELL = 0.5    # m, start-pose sampling grid
_POSE_MARGIN = 0.1  # m of clearance beyond contact required at spawn

TRIALS_HEADER = "trial,outcome,steps,time_s,path_length_m"
METRICS_HEADER = "planner,collisions,trials,avg_time_s,avg_path_length_m,successes,timeouts"
CURVE_HEADER = "episode,return,steps,outcome,epsilon"
TRAJECTORY_HEADER = "t,x,y,theta,v,omega,min_scan,source"
LOG_VERSION = 1

Controller = Callable[[World, object], tuple[object, str]]


def make_rng(seed: int, purpose: str, *extra: int) -> np.random.Generator:
    """Independent, reproducible stream for one purpose (and optional trial)."""
    return np.random.default_rng([seed, _STREAMS[purpose], *extra])


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: str, rows: list[list]) -> None:
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def sample_start_pose(spec: WorldSpec, world: World, rng: np.random.Generator) -> RobotState:
    """Uniform draw over collision-free grid cells, with a uniform heading.

    Cells already inside the goal disc are excluded so sampled episodes
    always require some motion.
    """
    w, h = spec.bounds
    nx = max(1, int(w / _POSE_CELL))
    ny = max(1, int(h / _POSE_CELL))
    reach = spec.robot_radius + _POSE_MARGIN
    free = []
    for ix in range(nx):
        for iy in range(ny):
            cx = (ix + 0.5) * _POSE_CELL
            cy = (iy + 0.5) * _POSE_CELL
            if math.hypot(cx - spec.goal[0], cy - spec.goal[1]) <= spec.goal_radius:
                continue
            wall = min(cx, cy, w - cx, h - cy)
            if wall <= reach:
                continue
            if min_obstacle_distance(cx, cy, spec.obstacles, world.obstacles) > reach:
                free.append((cx, cy))
    if not free:
        raise ValueError("no collision-free start cells in this world")
    cx, cy = free[int(rng.integers(len(free)))]
    theta = float(rng.uniform(-math.pi, math.pi))
    return RobotState(cx, cy, theta, 0.0, 0.0)


def _draw_phases(spec: WorldSpec, rng: np.random.Generator) -> tuple[float, ...]:
    """One polyline travel offset per dynamic obstacle, in spec order."""
    phases = []
    for ob in spec.obstacles:
        if ob.kind == "dynamic":
            phases.append(float(rng.uniform(0.0, polyline_cycle_length(ob))))
    return tuple(phases)


def make_trial_world(scenario: Scenario, seed: int, trial: int) -> World:
    """Seeded initial world for one evaluation trial.

    Derivation depends only on (seed, trial), so every planner compared
    under the same seed sees identical start poses and obstacle phases.
    """
    spec = scenario.world
    phases = _draw_phases(spec, make_rng(seed, "obstacle_phase", trial))
    world = World.from_spec(spec, obstacle_phases=phases)
    start = sample_start_pose(spec, world, make_rng(seed, "start_pose", trial))
    return World.from_spec(spec, robot=start, obstacle_phases=phases)


@dataclass
class TrialResult:
    outcome: str          # "success" | "collision" | "timeout"
    steps: int
    time_s: float
    path_length_m: float
    rows: list[dict] | None = None  # trajectory log rows when collected


@dataclass
class TrialMetrics:
    """Aggregate of one planner's trials: collision rate plus success-only averages."""
    planner: str
    n_trials: int
    collisions: int
    successes: int
    timeouts: int
    avg_time_s: float
    avg_path_length_m: float

    @property
    def collision_rate(self) -> str:
        return f"{self.collisions}/{self.n_trials}"


def aggregate_metrics(planner: str, results: list[TrialResult]) -> TrialMetrics:
    collisions = sum(1 for r in results if r.outcome == "collision")
    successes = sum(1 for r in results if r.outcome == "success")
    timeouts = sum(1 for r in results if r.outcome == "timeout")
    times = [r.time_s for r in results if r.outcome == "success"]
    lengths = [r.path_length_m for r in results if r.outcome == "success"]
    return TrialMetrics(
        planner=planner,
        n_trials=len(results),
        collisions=collisions,
        successes=successes,
        timeouts=timeouts,
        avg_time_s=sum(times) / len(times) if times else math.nan,
        avg_path_length_m=sum(lengths) / len(lengths) if lengths else math.nan,
    )


def dwa_controller(scenario: Scenario) -> Controller:
    def control(world: World, scan) -> tuple:
        return plan_dwa(world.robot, world, scenario.dwa), "dwa"
    return control


def hybrid_controller(scenario: Scenario, actor: Mlp) -> Controller:
    def control(world: World, scan) -> tuple:
        return plan_hybrid(world.robot, world, scan, actor, scenario.dwa)
    return control


def run_trial(scenario: Scenario, world: World, controller: Controller,
              collect_log: bool = False) -> TrialResult:
    """Closed-loop episode without exploration: goal, collision, or timeout."""
    spec = scenario.world
    sensor = scenario.sensor
    max_steps = scenario.training.max_steps
    scan = cast_scan(world.robot, world, sensor)
    rows: list[dict] | None = None
    if collect_log:
        rows = [_log_row(0.0, world.robot, scan.min_range(), "init")]
    if goal_reached(world.robot, world):
        return TrialResult("success", 0, 0.0, 0.0, rows)
    path_length = 0.0
    outcome = "timeout"
    steps = 0
    for k in range(1, max_steps + 1):
        cmd, tag = controller(world, scan)
        world = world.step(cmd)
        path_length += world.robot.v * spec.dt
        steps = k
        collided = check_collision(world.robot, world)
        reached = (not collided) and goal_reached(world.robot, world)
        terminal = collided or reached
        if collect_log or not terminal:
            scan = cast_scan(world.robot, world, sensor)
        if collect_log:
            rows.append(_log_row(k * spec.dt, world.robot, scan.min_range(), tag))
        if collided:
            outcome = "collision"
            break
        if reached:
            outcome = "success"
            break
    return TrialResult(outcome, steps, steps * spec.dt, path_length, rows)


def _log_row(t: float, state: RobotState, min_scan: float, source: str) -> dict:
    return {"t": t, "x": state.x, "y": state.y, "theta": state.theta,
            "v": state.v, "omega": state.omega, "min_scan": min_scan, "source": source}


def train(scenario: Scenario, seed: int, episodes: int | None, out_dir) -> tuple[Path, Path]:
    """Seeded training loop; writes checkpoint.json and training_curve.csv.

    Start pose and obstacle phases are redrawn together every
    pose_reshuffle_every episodes. Exploration actions act on the world
    directly (no DWA filter) so the agent experiences their consequences.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = scenario.world
    sensor = scenario.sensor
    cfg = scenario.td3
    if episodes is None:
        episodes = scenario.training.episodes
    max_steps = scenario.training.max_steps
    reshuffle = scenario.training.pose_reshuffle_every

    rng_init = make_rng(seed, "init")
    rng_explore = make_rng(seed, "explore")
    rng_smoothing = make_rng(seed, "smoothing")
    rng_pose = make_rng(seed, "start_pose")
    rng_phase = make_rng(seed, "obstacle_phase")

    obs_dim = observation_dim(sensor.n_beams)
    agent = Td3Agent(obs_dim, 2, cfg, rng_init)
    buffer = ReplayBuffer(cfg.capacity, obs_dim, 2)
    eps = EpsilonState(cfg.eps0)

    start = spec.start
    phases: tuple[float, ...] = ()
    curve_rows: list[list] = []
    for episode in range(episodes):
        if episode % reshuffle == 0:
            phases = _draw_phases(spec, rng_phase)
            placed = World.from_spec(spec, obstacle_phases=phases)
            start = sample_start_pose(spec, placed, rng_pose)
        world = World.from_spec(spec, robot=start, obstacle_phases=phases)
        obs = build_observation(cast_scan(world.robot, world, sensor), world.robot, world).vector()
        ep_return = 0.0
        outcome = "timeout"
        steps = 0
        for k in range(1, max_steps + 1):
            action = select_action(agent.actor, obs, eps, cfg, rng_explore, explore=True)
            cmd = scale_action(action, spec.limits)
            prev = world.robot
            world = world.step(cmd)
            steps = k
            collided = check_collision(world.robot, world)
            reached = (not collided) and goal_reached(world.robot, world)
            now = "collision" if collided else "goal" if reached else "ongoing"
            reward = compute_reward(prev, world.robot, world, now, scenario.reward)
            next_obs = build_observation(cast_scan(world.robot, world, sensor),
                                         world.robot, world).vector()
            done = collided or reached
            buffer.push(obs, action, reward, next_obs, done)
            update_step(agent, buffer, cfg, rng_smoothing)
            ep_return += reward
            obs = next_obs
            if done:
                outcome = now
                break
        curve_rows.append([episode, ep_return, steps, outcome, eps.current])
        eps = decay_epsilon(eps, cfg)

    checkpoint_path = out / "checkpoint.json"
    curve_path = out / "training_curve.csv"
    save_checkpoint(checkpoint_path, agent, cfg, eps)
    _write_csv(curve_path, CURVE_HEADER, curve_rows)
    return checkpoint_path, curve_path


def evaluate(scenario: Scenario, planner: str, n_trials: int, seed: int,
             checkpoint=None, out_dir=None) -> tuple[TrialMetrics, list[TrialResult]]:
    """Run seeded paired-ready trials for one planner.

    With out_dir set, writes <planner>_trials.csv plus one JSON trajectory
    log per trial for the replay command.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if planner not in PLANNERS:
        raise ValueError(f"unknown planner {planner!r}; expected one of {PLANNERS}")
    if planner == "td3-dwa":
        if checkpoint is None:
            raise ValueError("td3-dwa evaluation requires a checkpoint")
        agent, _, _ = load_checkpoint(checkpoint)
        expected = observation_dim(scenario.sensor.n_beams)
        if agent.actor.layer_sizes[0] != expected:
            raise ValueError(
                f"checkpoint expects {agent.actor.layer_sizes[0]} observation dims, "
                f"scenario produces {expected}")
        controller = hybrid_controller(scenario, agent.actor)
    else:
        controller = dwa_controller(scenario)

    out = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
    results = []
    for trial in range(n_trials):
        world = make_trial_world(scenario, seed, trial)
        result = run_trial(scenario, world, controller, collect_log=out is not None)
        if out is not None:
            log = {
                "schema_version": LOG_VERSION,
                "scenario": scenario.name,
                "planner": planner,
                "seed": seed,
                "trial": trial,
                "dt": scenario.world.dt,
                "rows": result.rows,
            }
            (out / f"{planner}_trial_{trial:03d}.json").write_text(json.dumps(log))
        results.append(TrialResult(result.outcome, result.steps, result.time_s,
                                   result.path_length_m))
    metrics = aggregate_metrics(planner, results)
    if out is not None:
        _write_csv(out / f"{planner}_trials.csv", TRIALS_HEADER,
                   [[i, r.outcome, r.steps, r.time_s, r.path_length_m]
                    for i, r in enumerate(results)])
        _write_csv(out / f"{planner}_metrics.csv", METRICS_HEADER, [_metrics_row(metrics)])
    return metrics, results


def _metrics_row(m: TrialMetrics) -> list:
    return [m.planner, m.collisions, m.n_trials, m.avg_time_s, m.avg_path_length_m,
            m.successes, m.timeouts]


def compare(scenario: Scenario, planners: list[str], n_trials: int, seed: int,
            checkpoint=None, out_dir=None) -> list[TrialMetrics]:
    """Evaluate every planner on identical per-trial worlds; one row each."""
    if len(planners) < 2:
        raise ValueError("compare needs at least 2 planners")
    metrics = [evaluate(scenario, p, n_trials, seed, checkpoint=checkpoint)[0]
               for p in planners]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "comparison.csv", METRICS_HEADER,
                   [_metrics_row(m) for m in metrics])
    return metrics


def format_comparison(metrics: list[TrialMetrics]) -> str:
    """Console table in the benchmark's column order."""
    lines = ["Method, Collision, Avg. Time (s), Avg. Path Length (m)"]
    for m in metrics:
        label = PLANNER_LABELS.get(m.planner, m.planner)
        lines.append(f"{label}, {m.collision_rate}, {m.avg_time_s:.1f}, {m.avg_path_length_m:.1f}")
    return "\n".join(lines)


def replay(log_path, out_path) -> Path:
    """Convert a trial log into a trajectory CSV (one row per control step)."""
    path = Path(log_path)
    if not path.exists():
        raise ValueError(f"trial log {path} does not exist")
    try:
        log = json.loads(path.read_text())
        rows = log["rows"]
        csv_rows = [[r["t"], r["x"], r["y"], r["theta"], r["v"], r["omega"],
                     r["min_scan"], r["source"]] for r in rows]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"corrupt trial log {path}: {exc}") from exc
    out = Path(out_path)
    _write_csv(out, TRAJECTORY_HEADER, csv_rows)
    return out
