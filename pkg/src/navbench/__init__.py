"""Deterministic 2D navigation workbench: DWA, a from-scratch TD3 learner,
their hybrid planner, and a seeded benchmark harness."""

__version__ = "0.1.0"

from .dwa import (
    CostWeights,
    DwaConfig,
    DynamicWindow,
    NoFeasibleTrajectory,
    compute_window,
    plan_dwa,
    rollout,
)
from .hybrid import (
    Observation,
    RewardConfig,
    build_observation,
    compute_reward,
    plan_hybrid,
    scale_action,
)
from .lidar import LidarScan, SensorConfig, cast_scan
from .scenario import Scenario, ScenarioError, load_scenario
from .td3 import EpsilonState, ReplayBuffer, Td3Agent, Td3Config
from .world import (
    Limits,
    Obstacle,
    ObstaclePose,
    RobotState,
    VelocityCommand,
    World,
    WorldSpec,
    check_collision,
    goal_reached,
    step_kinematics,
)

__all__ = [
    "CostWeights", "DwaConfig", "DynamicWindow", "NoFeasibleTrajectory",
    "compute_window", "plan_dwa", "rollout",
    "Observation", "RewardConfig", "build_observation", "compute_reward",
    "plan_hybrid", "scale_action",
    "LidarScan", "SensorConfig", "cast_scan",
    "Scenario", "ScenarioError", "load_scenario",
    "EpsilonState", "ReplayBuffer", "Td3Agent", "Td3Config",
    "Limits", "Obstacle", "ObstaclePose", "RobotState", "VelocityCommand",
    "World", "WorldSpec", "check_collision", "goal_reached", "step_kinematics",
]
