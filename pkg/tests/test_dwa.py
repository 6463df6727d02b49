import math

import numpy as np
import pytest

from navbench.dwa import (
    CostWeights,
    DwaConfig,
    NoFeasibleTrajectory,
    TrajectoryRollout,
    compute_window,
    cost_terms,
    plan_dwa,
    rollout,
    total_cost,
    window_commands,
)
from navbench.world import (
    Limits,
    Obstacle,
    RobotState,
    VelocityCommand,
    World,
    WorldSpec,
    check_collision,
    step_kinematics,
)

LIMITS = Limits(v_max=1.2, omega_max=1.57, a_max=1.0, alpha_max=3.0)


def make_world(obstacles=(), bounds=(40.0, 40.0), robot=None, goal=None, robot_radius=0.2):
    spec = WorldSpec(bounds=bounds,
                     start=robot or RobotState(bounds[0] / 2, bounds[1] / 2, 0.0),
                     goal=goal or (bounds[0] - 2.0, bounds[1] / 2),
                     goal_radius=0.3,
                     obstacles=tuple(obstacles),
                     robot_radius=robot_radius,
                     limits=LIMITS,
                     dt=0.1)
    return World.from_spec(spec, robot=spec.start)


# --- dynamic window ---

def test_window_plain_arithmetic():
    w = compute_window(RobotState(0, 0, 0, v=0.5, omega=0.0), LIMITS, 0.1)
    assert (w.v_lo, w.v_hi) == (0.4, 0.6)


def test_window_clamps_v_lo_at_zero():
    w = compute_window(RobotState(0, 0, 0, v=0.0), LIMITS, 0.1)
    assert w.v_lo == 0.0


def test_window_caps_v_hi_at_v_max():
    w = compute_window(RobotState(0, 0, 0, v=1.15), LIMITS, 0.1)
    assert w.v_hi == 1.2


def test_window_matches_interval_arithmetic_exactly():
    rng = np.random.default_rng(42)
    hit_lo = hit_hi = hit_wlo = hit_whi = 0
    for _ in range(1000):
        v = float(rng.uniform(0.0, 1.2))
        om = float(rng.uniform(-1.57, 1.57))
        a = float(rng.uniform(0.1, 3.0))
        al = float(rng.uniform(0.1, 6.0))
        dt = float(rng.uniform(0.01, 0.5))
        lim = Limits(1.2, 1.57, a, al)
        w = compute_window(RobotState(0, 0, 0, v=v, omega=om), lim, dt)
        assert w.v_lo == max(0.0, v - a * dt)
        assert w.v_hi == min(1.2, v + a * dt)
        assert w.w_lo == max(-1.57, om - al * dt)
        assert w.w_hi == min(1.57, om + al * dt)
        hit_lo += v - a * dt < 0.0
        hit_hi += v + a * dt > 1.2
        hit_wlo += om - al * dt < -1.57
        hit_whi += om + al * dt > 1.57
    assert min(hit_lo, hit_hi, hit_wlo, hit_whi) > 0  # both clamp branches exercised


def test_window_commands_stay_inside_window():
    w = compute_window(RobotState(0, 0, 0, v=0.37, omega=0.21), LIMITS, 0.1)
    cmds = window_commands(w, 7, 11)
    assert len(cmds) == 77
    for c in cmds:
        assert w.v_lo <= c.v <= w.v_hi
        assert w.w_lo <= c.omega <= w.w_hi
    vs = sorted({c.v for c in cmds})
    assert vs[0] == w.v_lo and vs[-1] == w.v_hi


# --- rollout ---

def test_zero_command_rollout_is_stationary_and_feasible():
    world = make_world()
    ro = rollout(world.robot, VelocityCommand(0.0, 0.0), world, 10, 0.1)
    assert ro.feasible
    assert len(ro.poses) == 11
    assert all((p.x, p.y, p.theta) == (world.robot.x, world.robot.y, world.robot.theta)
               for p in ro.poses)


def test_rollout_into_wall_is_infeasible():
    # wall 0.5 m ahead at v = 1.0: contact inside a 10-step horizon
    world = make_world(bounds=(10.0, 10.0), robot=RobotState(9.5, 5.0, 0.0))
    ro = rollout(world.robot, VelocityCommand(1.0, 0.0), world, 10, 0.1)
    assert not ro.feasible


def test_rollout_pose_count_contract():
    world = make_world()
    ro = rollout(world.robot, VelocityCommand(0.5, 0.1), world, 1, 0.1)
    assert len(ro.poses) == 2
    assert ro.poses[0] == world.robot


def test_rollout_matches_repeated_step_kinematics():
    world = make_world()
    cmd = VelocityCommand(0.9, -0.7)
    ro = rollout(world.robot, cmd, world, 8, 0.1)
    s = world.robot
    for pose in ro.poses[1:]:
        s = step_kinematics(s, cmd, 0.1)
        assert pose == s


def test_rollout_propagates_dynamic_obstacles_in_lockstep():
    # obstacle retreating in front of the robot keeps a constant gap: feasible;
    # the same obstacle standing still is overtaken within the horizon.
    retreating = Obstacle("circle", kind="dynamic", radius=0.2, speed=1.0,
                          waypoints=((21.0, 20.0), (35.0, 20.0)), loop=False)
    static = Obstacle("circle", kind="static", center=(21.0, 20.0), radius=0.2)
    robot = RobotState(20.0, 20.0, 0.0, v=1.0)
    cmd = VelocityCommand(1.0, 0.0)
    w1 = make_world([retreating], robot=robot)
    w2 = make_world([static], robot=robot)
    assert rollout(robot, cmd, w1, 10, 0.1).feasible
    assert not rollout(robot, cmd, w2, 10, 0.1).feasible


# --- costs ---

def test_heading_zero_when_facing_goal():
    world = make_world(goal=(30.0, 20.0))
    ro = rollout(world.robot, VelocityCommand(0.0, 0.0), world, 5, 0.1)
    _, heading, _ = cost_terms(ro, world)
    assert heading == 0.0


def test_velocity_term_zero_at_top_speed():
    world = make_world()
    ro = rollout(world.robot, VelocityCommand(1.2, 0.0), world, 5, 0.1)
    _, _, vel = cost_terms(ro, world)
    assert vel == 0.0


def test_dist_term_is_inverse_clearance():
    ro = TrajectoryRollout(VelocityCommand(0.0, 0.0),
                           (RobotState(0.0, 0.0, 0.0),), True, 0.9)
    world = make_world()
    dist, _, _ = cost_terms(ro, world)
    assert dist == 1.0 / (0.9 + 0.1) == 1.0


def test_dist_term_from_real_clearance():
    ob = Obstacle("circle", center=(21.3, 20.0), radius=0.2)
    world = make_world([ob])
    ro = rollout(world.robot, VelocityCommand(0.0, 0.0), world, 5, 0.1)
    assert ro.min_clearance == pytest.approx(0.9, abs=1e-12)
    dist, _, _ = cost_terms(ro, world)
    assert dist == pytest.approx(1.0, rel=1e-12)


def test_cost_terms_rejects_infeasible():
    ro = TrajectoryRollout(VelocityCommand(0.0, 0.0),
                           (RobotState(0.0, 0.0, 0.0),), False, 0.0)
    with pytest.raises(ValueError):
        cost_terms(ro, make_world())


def test_total_cost_single_candidate_normalizes_to_weight_sum():
    weights = CostWeights(dist=1.0, heading=1.0, velocity=0.5)
    costs = total_cost([(2.0, 1.0, 0.5)], weights)
    assert costs == [2.5]


def test_total_cost_sum_normalization():
    weights = CostWeights(dist=1.0, heading=0.0, velocity=0.0)
    costs = total_cost([(1.0, 0.3, 0.3), (3.0, 0.3, 0.3)], weights)
    assert costs[0] == 0.25 and costs[1] == 0.75


def test_total_cost_zero_sum_term_contributes_nothing():
    weights = CostWeights(dist=1.0, heading=1.0, velocity=1.0)
    costs = total_cost([(0.0, 1.0, 0.0), (0.0, 3.0, 0.0)], weights)
    assert costs == [0.25, 0.75]


def test_total_cost_weight_scaling_doubles_g_keeps_argmin():
    terms = [(1.0, 2.0, 0.1), (0.5, 1.0, 0.4), (2.0, 0.5, 0.2)]
    w1 = CostWeights(dist=1.0, heading=1.0, velocity=0.5)
    w2 = CostWeights(dist=2.0, heading=2.0, velocity=1.0)
    c1 = total_cost(terms, w1)
    c2 = total_cost(terms, w2)
    assert all(b == 2.0 * a for a, b in zip(c1, c2))
    assert c1.index(min(c1)) == c2.index(min(c2))


def test_total_cost_empty_raises():
    with pytest.raises(NoFeasibleTrajectory):
        total_cost([], CostWeights())


# --- planning ---

def test_plan_empty_world_drives_straight_at_top_of_window():
    world = make_world(goal=(38.0, 20.0))
    config = DwaConfig(n_v=3, n_w=3, horizon=10)
    cmd = plan_dwa(world.robot, world, config)
    window = compute_window(world.robot, LIMITS, 0.1)
    assert cmd.omega == 0.0
    assert cmd.v == window.v_hi

    # independent hand evaluation of the same 3x3 grid
    def hand_g(cands):
        raws = []
        for v, om in cands:
            x, y, th = world.robot.x, world.robot.y, world.robot.theta
            for _ in range(10):
                x += v * math.cos(th) * 0.1
                y += v * math.sin(th) * 0.1
                th += om * 0.1
            bearing = math.atan2(world.spec.goal[1] - y, world.spec.goal[0] - x)
            heading = abs(math.atan2(math.sin(bearing - th), math.cos(bearing - th)))
            raws.append((0.0, heading, 1.2 - v))
        sums = [sum(r[k] for r in raws) for k in range(3)]
        out = []
        for r in raws:
            g = 0.0
            for k, w in enumerate((1.0, 1.0, 0.5)):
                if sums[k] > 0:
                    g += w * r[k] / sums[k]
            out.append(g)
        return out

    grid = [(v, om) for v in (window.v_lo, (window.v_lo + window.v_hi) / 2, window.v_hi)
            for om in (window.w_lo, (window.w_lo + window.w_hi) / 2, window.w_hi)]
    gs = hand_g(grid)
    v_best, om_best = grid[gs.index(min(gs))]
    assert (cmd.v, cmd.omega) == (v_best, om_best)


def test_plan_single_feasible_candidate_is_returned():
    # a faster pedestrian chasing from behind-left: of the 2x2 grid only the
    # full-speed right-turn escape stays collision-free
    robot = RobotState(20.0, 20.0, 0.0, v=1.2)
    ped = Obstacle("circle", kind="dynamic", radius=0.25, speed=1.35,
                   waypoints=((19.5, 20.2), (49.5, 20.2)), loop=False)
    world = make_world([ped], robot=robot)
    config = DwaConfig(n_v=2, n_w=2, horizon=10)
    feasible = [c for c in window_commands(compute_window(robot, LIMITS, 0.1),
                                           config.n_v, config.n_w)
                if rollout(robot, c, world, config.horizon, 0.1).feasible]
    assert len(feasible) == 1
    assert plan_dwa(robot, world, config) == feasible[0]


def test_plan_symmetric_obstacles_resolve_to_straight():
    obstacles = [Obstacle("circle", center=(22.0, 21.0), radius=0.4),
                 Obstacle("circle", center=(22.0, 19.0), radius=0.4)]
    world = make_world(obstacles, goal=(38.0, 20.0))
    cmd = plan_dwa(world.robot, world, DwaConfig())
    assert cmd.omega == 0.0


def test_plan_recovery_returns_rotation():
    # at full speed 0.25 m from the wall nothing in the window survives
    world = make_world(bounds=(12.0, 40.0), robot=RobotState(11.55, 20.0, 0.0, v=1.2))
    config = DwaConfig(n_v=3, n_w=3, horizon=10)
    window = compute_window(world.robot, LIMITS, 0.1)
    cmd = plan_dwa(world.robot, world, config)
    assert cmd == VelocityCommand(0.0, window.w_hi)


def test_plan_weight_scaling_never_changes_choice():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n_obs = int(rng.integers(1, 5))
        obstacles = [Obstacle("circle",
                              center=(float(rng.uniform(16, 28)), float(rng.uniform(14, 26))),
                              radius=float(rng.uniform(0.2, 0.8)))
                     for _ in range(n_obs)]
        robot = RobotState(20.0, 20.0, float(rng.uniform(-math.pi, math.pi)),
                           v=float(rng.uniform(0, 1.2)), omega=float(rng.uniform(-1.0, 1.0)))
        world = make_world(obstacles, robot=robot, goal=(30.0, 30.0))
        if check_collision(robot, world):
            continue
        c = float(rng.uniform(0.1, 10.0))
        base = CostWeights(1.0, 1.0, 0.5)
        scaled = CostWeights(base.dist * c, base.heading * c, base.velocity * c)
        cmd1 = plan_dwa(robot, world, DwaConfig(n_v=5, n_w=7, horizon=8, weights=base))
        cmd2 = plan_dwa(robot, world, DwaConfig(n_v=5, n_w=7, horizon=8, weights=scaled))
        assert cmd1 == cmd2


def test_plan_result_is_collision_free_when_feasible_exists():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(120):
        obstacles = [Obstacle("circle",
                              center=(float(rng.uniform(17, 27)), float(rng.uniform(15, 25))),
                              radius=float(rng.uniform(0.2, 0.7)))
                     for _ in range(int(rng.integers(1, 6)))]
        robot = RobotState(float(rng.uniform(18, 22)), float(rng.uniform(18, 22)),
                           float(rng.uniform(-math.pi, math.pi)),
                           v=float(rng.uniform(0, 1.2)), omega=float(rng.uniform(-1.2, 1.2)))
        world = make_world(obstacles, robot=robot, goal=(32.0, 32.0))
        if check_collision(robot, world):
            continue
        config = DwaConfig(n_v=5, n_w=7, horizon=8)
        cmd = plan_dwa(robot, world, config)
        window = compute_window(robot, LIMITS, 0.1)
        any_feasible = any(
            rollout(robot, c, world, config.horizon, 0.1).feasible
            for c in window_commands(window, config.n_v, config.n_w))
        if any_feasible:
            assert rollout(robot, cmd, world, config.horizon, 0.1).feasible
            checked += 1
    assert checked > 30


def test_no_pruning_in_obstacle_free_world():
    world = make_world()
    window = compute_window(world.robot, LIMITS, 0.1)
    for c in window_commands(window, 7, 11):
        assert rollout(world.robot, c, world, 10, 0.1).feasible


def test_plan_is_deterministic():
    obstacles = [Obstacle("circle", center=(22.0, 20.5), radius=0.5)]
    world = make_world(obstacles)
    cmds = {plan_dwa(world.robot, world, DwaConfig()) for _ in range(5)}
    assert len(cmds) == 1
