"""Scenario files: strict JSON loading and validation of every config block.

Unknown keys are errors so experiment files stay auditable; all module
invariants are enforced at load time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dwa import CostWeights, DwaConfig
from .hybrid import RewardConfig, validate_reward_config
from .lidar import SensorConfig, validate_sensor
from .td3 import Td3Config, validate_td3_config
from .world import Limits, Obstacle, RobotState, WorldSpec, validate_spec

SCHEMA_VERSION = 1


class ScenarioError(Exception):
    """A scenario file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class TrainingConfig:
    episodes: int = 3300
    max_steps: int = 300
    pose_reshuffle_every: int = 20


@dataclass(frozen=True)
class Scenario:
    name: str
    world: WorldSpec
    sensor: SensorConfig
    dwa: DwaConfig
    td3: Td3Config
    reward: RewardConfig
    training: TrainingConfig


def _require_mapping(data, ctx: str) -> dict:
    if not isinstance(data, dict):
        raise ScenarioError(f"{ctx}: expected an object")
    return data


def _check_keys(data: dict, allowed: set[str], required: set[str], ctx: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ScenarioError(f"{ctx}: unknown key(s) {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ScenarioError(f"{ctx}: missing key(s) {sorted(missing)}")


def _number(data: dict, key: str, ctx: str, default=None) -> float:
    if key not in data:
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{ctx}.{key}: expected a finite number")
    return float(value)


def _integer(data: dict, key: str, ctx: str, default=None) -> int:
    if key not in data:
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{ctx}.{key}: expected an integer")
    return value


def _point(value, ctx: str) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v)
                   for v in value)):
        raise ScenarioError(f"{ctx}: expected [x, y]")
    return (float(value[0]), float(value[1]))


def _parse_obstacle(data, ctx: str) -> Obstacle:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"shape", "kind", "center", "radius", "min", "max",
                       "waypoints", "speed", "loop"}, {"shape"}, ctx)
    shape = data["shape"]
    kind = data.get("kind", "static")
    center = _point(data["center"], f"{ctx}.center") if "center" in data else None
    rect_min = _point(data["min"], f"{ctx}.min") if "min" in data else None
    rect_max = _point(data["max"], f"{ctx}.max") if "max" in data else None
    waypoints: tuple = ()
    if "waypoints" in data:
        if not isinstance(data["waypoints"], list):
            raise ScenarioError(f"{ctx}.waypoints: expected a list of points")
        waypoints = tuple(_point(p, f"{ctx}.waypoints[{i}]")
                          for i, p in enumerate(data["waypoints"]))
    loop = data.get("loop", True)
    if not isinstance(loop, bool):
        raise ScenarioError(f"{ctx}.loop: expected a boolean")
    return Obstacle(
        shape=shape,
        kind=kind,
        center=center,
        radius=_number(data, "radius", ctx, 0.0),
        rect_min=rect_min,
        rect_max=rect_max,
        waypoints=waypoints,
        speed=_number(data, "speed", ctx, 0.0),
        loop=loop,
    )


def _parse_world(data, ctx: str) -> WorldSpec:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"bounds", "start", "goal", "goal_radius", "obstacles",
                       "robot_radius", "limits", "dt"},
                {"bounds", "start", "goal", "goal_radius"}, ctx)
    start_data = _require_mapping(data["start"], f"{ctx}.start")
    _check_keys(start_data, {"x", "y", "theta", "v", "omega"}, {"x", "y", "theta"}, f"{ctx}.start")
    start = RobotState(
        _number(start_data, "x", f"{ctx}.start"),
        _number(start_data, "y", f"{ctx}.start"),
        _number(start_data, "theta", f"{ctx}.start"),
        _number(start_data, "v", f"{ctx}.start", 0.0),
        _number(start_data, "omega", f"{ctx}.start", 0.0),
    )
    limits = Limits()
    if "limits" in data:
        lim_data = _require_mapping(data["limits"], f"{ctx}.limits")
        _check_keys(lim_data, {"v_max", "omega_max", "a_max", "alpha_max"}, set(), f"{ctx}.limits")
        defaults = Limits()
        limits = Limits(
            _number(lim_data, "v_max", f"{ctx}.limits", defaults.v_max),
            _number(lim_data, "omega_max", f"{ctx}.limits", defaults.omega_max),
            _number(lim_data, "a_max", f"{ctx}.limits", defaults.a_max),
            _number(lim_data, "alpha_max", f"{ctx}.limits", defaults.alpha_max),
        )
    obstacles = ()
    if "obstacles" in data:
        if not isinstance(data["obstacles"], list):
            raise ScenarioError(f"{ctx}.obstacles: expected a list")
        obstacles = tuple(_parse_obstacle(ob, f"{ctx}.obstacles[{i}]")
                          for i, ob in enumerate(data["obstacles"]))
    return WorldSpec(
        bounds=_point(data["bounds"], f"{ctx}.bounds"),
        start=start,
        goal=_point(data["goal"], f"{ctx}.goal"),
        goal_radius=_number(data, "goal_radius", ctx),
        obstacles=obstacles,
        robot_radius=_number(data, "robot_radius", ctx, 0.2),
        limits=limits,
        dt=_number(data, "dt", ctx, 0.1),
    )


def _parse_sensor(data, ctx: str) -> SensorConfig:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"n_beams", "fov", "max_range"}, set(), ctx)
    d = SensorConfig()
    return SensorConfig(
        _integer(data, "n_beams", ctx, d.n_beams),
        _number(data, "fov", ctx, d.fov),
        _number(data, "max_range", ctx, d.max_range),
    )


def _parse_dwa(data, ctx: str) -> DwaConfig:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"n_v", "n_w", "horizon", "weights", "safety_margin"}, set(), ctx)
    weights = CostWeights()
    if "weights" in data:
        w_data = _require_mapping(data["weights"], f"{ctx}.weights")
        _check_keys(w_data, {"dist", "heading", "velocity"}, set(), f"{ctx}.weights")
        dw = CostWeights()
        weights = CostWeights(
            _number(w_data, "dist", f"{ctx}.weights", dw.dist),
            _number(w_data, "heading", f"{ctx}.weights", dw.heading),
            _number(w_data, "velocity", f"{ctx}.weights", dw.velocity),
        )
    d = DwaConfig()
    return DwaConfig(
        _integer(data, "n_v", ctx, d.n_v),
        _integer(data, "n_w", ctx, d.n_w),
        _integer(data, "horizon", ctx, d.horizon),
        weights,
        _number(data, "safety_margin", ctx, d.safety_margin),
    )


def _parse_td3(data, ctx: str) -> Td3Config:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"gamma", "tau", "policy_delay", "smoothing_sigma", "smoothing_clip",
                       "explore_sigma", "batch_size", "lr_actor", "lr_critic",
                       "eps0", "eps_decay", "eps_min", "capacity", "hidden_sizes"}, set(), ctx)
    d = Td3Config()
    hidden = d.hidden_sizes
    if "hidden_sizes" in data:
        if (not isinstance(data["hidden_sizes"], list)
                or any(isinstance(v, bool) or not isinstance(v, int) for v in data["hidden_sizes"])):
            raise ScenarioError(f"{ctx}.hidden_sizes: expected a list of integers")
        hidden = tuple(data["hidden_sizes"])
    return Td3Config(
        gamma=_number(data, "gamma", ctx, d.gamma),
        tau=_number(data, "tau", ctx, d.tau),
        policy_delay=_integer(data, "policy_delay", ctx, d.policy_delay),
        smoothing_sigma=_number(data, "smoothing_sigma", ctx, d.smoothing_sigma),
        smoothing_clip=_number(data, "smoothing_clip", ctx, d.smoothing_clip),
        explore_sigma=_number(data, "explore_sigma", ctx, d.explore_sigma),
        batch_size=_integer(data, "batch_size", ctx, d.batch_size),
        lr_actor=_number(data, "lr_actor", ctx, d.lr_actor),
        lr_critic=_number(data, "lr_critic", ctx, d.lr_critic),
        eps0=_number(data, "eps0", ctx, d.eps0),
        eps_decay=_number(data, "eps_decay", ctx, d.eps_decay),
        eps_min=_number(data, "eps_min", ctx, d.eps_min),
        capacity=_integer(data, "capacity", ctx, d.capacity),
        hidden_sizes=hidden,
    )


def _parse_reward(data, ctx: str) -> RewardConfig:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"r_goal", "r_collision", "progress_scale", "step_penalty"}, set(), ctx)
    d = RewardConfig()
    return RewardConfig(
        _number(data, "r_goal", ctx, d.r_goal),
        _number(data, "r_collision", ctx, d.r_collision),
        _number(data, "progress_scale", ctx, d.progress_scale),
        _number(data, "step_penalty", ctx, d.step_penalty),
    )


def _parse_training(data, ctx: str) -> TrainingConfig:
    data = _require_mapping(data, ctx)
    _check_keys(data, {"episodes", "max_steps", "pose_reshuffle_every"}, set(), ctx)
    d = TrainingConfig()
    cfg = TrainingConfig(
        _integer(data, "episodes", ctx, d.episodes),
        _integer(data, "max_steps", ctx, d.max_steps),
        _integer(data, "pose_reshuffle_every", ctx, d.pose_reshuffle_every),
    )
    if cfg.episodes < 0 or cfg.max_steps < 1 or cfg.pose_reshuffle_every < 1:
        raise ScenarioError(f"{ctx}: episodes >= 0, max_steps >= 1, pose_reshuffle_every >= 1")
    return cfg


def scenario_from_dict(data: dict, name: str) -> Scenario:
    data = _require_mapping(data, name)
    _check_keys(data, {"schema_version", "world", "sensor", "dwa", "td3", "reward", "training"},
                {"schema_version", "world"}, name)
    if data["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(f"{name}: unsupported schema_version {data['schema_version']!r}")
    scenario = Scenario(
        name=name,
        world=_parse_world(data["world"], f"{name}.world"),
        sensor=_parse_sensor(data.get("sensor", {}), f"{name}.sensor"),
        dwa=_parse_dwa(data.get("dwa", {}), f"{name}.dwa"),
        td3=_parse_td3(data.get("td3", {}), f"{name}.td3"),
        reward=_parse_reward(data.get("reward", {}), f"{name}.reward"),
        training=_parse_training(data.get("training", {}), f"{name}.training"),
    )
    try:
        validate_spec(scenario.world)
        validate_sensor(scenario.sensor)
        validate_td3_config(scenario.td3)
        validate_reward_config(scenario.reward)
    except ValueError as exc:
        raise ScenarioError(f"{name}: {exc}") from exc
    if scenario.dwa.n_v < 2 or scenario.dwa.n_w < 2:
        raise ScenarioError(f"{name}.dwa: n_v and n_w must be >= 2")
    if scenario.dwa.horizon < 1:
        raise ScenarioError(f"{name}.dwa: horizon must be >= 1")
    if scenario.dwa.safety_margin < 0.0:
        raise ScenarioError(f"{name}.dwa: safety_margin must be >= 0")
    w = scenario.dwa.weights
    if w.dist < 0.0 or w.heading < 0.0 or w.velocity < 0.0 or w.dist + w.heading + w.velocity <= 0.0:
        raise ScenarioError(f"{name}.dwa.weights: weights must be >= 0 and not all zero")
    return scenario


def list_bundled() -> list[str]:
    root = resources.files("navbench").joinpath("scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load from a JSON file path, or from the bundled set by bare name."""
    path = Path(path_or_name)
    if path.suffix == ".json" or path.exists():
        try:
            raw = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
        name = path.stem
    else:
        resource = resources.files("navbench").joinpath(f"scenarios/{path_or_name}.json")
        if not resource.is_file():
            raise ScenarioError(
                f"unknown scenario {path_or_name!r}; bundled: {', '.join(list_bundled())}")
        raw = resource.read_text()
        name = str(path_or_name)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{name}: invalid JSON: {exc}") from exc
    return scenario_from_dict(data, name)
