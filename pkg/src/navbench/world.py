"""Deterministic 2D world: differential-drive kinematics, waypoint obstacles, collision and goal tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import clamp, normalize_angle, point_rect_distance

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class RobotState:
    """Pose and velocities of a differential-drive robot.

    theta stays in (-pi, pi] after every update; v is the forward speed
    (never negative), omega the signed yaw rate.
    """
    x: float
    y: float
    theta: float
    v: float = 0.0
    omega: float = 0.0


@dataclass(frozen=True)
class VelocityCommand:
    v: float
    omega: float


@dataclass(frozen=True)
class Limits:
    """Actuation limits: top speeds plus per-second acceleration bounds."""
    v_max: float = 1.2
    omega_max: float = 1.57
    a_max: float = 1.0
    alpha_max: float = 3.0


@dataclass(frozen=True)
class Obstacle:
    """Static or waypoint-following obstacle.

    Circles may be static or dynamic; rectangles are static only. A dynamic
    obstacle starts on its waypoint polyline (waypoints[0] unless the world
    is created with a phase offset) and heads toward consecutive waypoints
    at constant speed, wrapping to waypoints[0] when ``loop`` is true and
    parking at the last waypoint otherwise.
    """
    shape: str                                   # "circle" | "rect"
    kind: str = "static"                         # "static" | "dynamic"
    center: Vec2 | None = None                   # circle only
    radius: float = 0.0
    rect_min: Vec2 | None = None                 # rect only
    rect_max: Vec2 | None = None
    waypoints: tuple[Vec2, ...] = ()
    speed: float = 0.0
    loop: bool = True


def validate_obstacle(ob: Obstacle) -> None:
    if ob.shape not in ("circle", "rect"):
        raise ValueError(f"unknown obstacle shape {ob.shape!r}")
    if ob.kind not in ("static", "dynamic"):
        raise ValueError(f"unknown obstacle kind {ob.kind!r}")
    if ob.shape == "circle":
        if not ob.radius > 0.0:
            raise ValueError("circle obstacle needs radius > 0")
        if ob.kind == "static" and ob.center is None:
            raise ValueError("static circle obstacle needs a center")
    else:
        if ob.kind == "dynamic":
            raise ValueError("dynamic obstacles must be circles")
        if ob.rect_min is None or ob.rect_max is None:
            raise ValueError("rect obstacle needs rect_min and rect_max")
        if not (ob.rect_min[0] < ob.rect_max[0] and ob.rect_min[1] < ob.rect_max[1]):
            raise ValueError("rect obstacle needs rect_min < rect_max componentwise")
    if ob.kind == "dynamic":
        if not ob.speed > 0.0:
            raise ValueError("dynamic obstacle needs speed > 0")
        if len(ob.waypoints) < 2:
            raise ValueError("dynamic obstacle needs at least 2 waypoints")


@dataclass(frozen=True)
class WorldSpec:
    """Immutable description of an arena: geometry, limits, timing.

    The arena occupies [0, bounds[0]] x [0, bounds[1]], with the four edges
    acting as solid walls.
    """
    bounds: Vec2
    start: RobotState
    goal: Vec2
    goal_radius: float
    obstacles: tuple[Obstacle, ...] = ()
    robot_radius: float = 0.2
    limits: Limits = Limits()
    dt: float = 0.1


@dataclass(frozen=True)
class ObstaclePose:
    """Runtime position of one obstacle: current center and waypoint target."""
    center: Vec2
    target: int = 0


def polyline_cycle_length(ob: Obstacle) -> float:
    pts = ob.waypoints
    total = 0.0
    for i in range(len(pts) - 1):
        total += math.hypot(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1])
    if ob.loop:
        total += math.hypot(pts[0][0] - pts[-1][0], pts[0][1] - pts[-1][1])
    return total


def place_on_polyline(ob: Obstacle, distance: float) -> ObstaclePose:
    """Pose after traveling ``distance`` along the waypoint path from waypoints[0]."""
    pts = ob.waypoints
    n = len(pts)
    total = polyline_cycle_length(ob)
    d = distance
    if ob.loop and total > 0.0:
        d = math.fmod(d, total)
        if d < 0.0:
            d += total
    i = 0
    while True:
        j = (i + 1) % n
        if not ob.loop and i == n - 1:
            return ObstaclePose(pts[-1], n - 1)
        seg = math.hypot(pts[j][0] - pts[i][0], pts[j][1] - pts[i][1])
        if d < seg:
            f = d / seg if seg > 0.0 else 0.0
            cx = pts[i][0] + f * (pts[j][0] - pts[i][0])
            cy = pts[i][1] + f * (pts[j][1] - pts[i][1])
            return ObstaclePose((cx, cy), j)
        d -= seg
        i = j
        if ob.loop and i == 0:
            # numerical leftover after a full lap
            return ObstaclePose(pts[0], 1 % n)


@dataclass(frozen=True)
class World:
    """Runtime snapshot: spec plus robot state, obstacle poses, and clock.

    Worlds are values; step() returns a new World, so planners can fork
    rollouts without mutating the live episode.
    """
    spec: WorldSpec
    robot: RobotState
    obstacles: tuple[ObstaclePose, ...]
    time: float = 0.0

    @classmethod
    def from_spec(cls, spec: WorldSpec, robot: RobotState | None = None,
                  obstacle_phases: tuple[float, ...] | None = None) -> "World":
        """Place obstacles at their initial poses.

        obstacle_phases gives, per dynamic obstacle in spec order, a travel
        distance along its polyline used as the starting offset.
        """
        poses = []
        dyn_idx = 0
        for ob in spec.obstacles:
            if ob.kind == "dynamic":
                phase = obstacle_phases[dyn_idx] if obstacle_phases is not None else 0.0
                poses.append(place_on_polyline(ob, phase))
                dyn_idx += 1
            elif ob.shape == "circle":
                poses.append(ObstaclePose(ob.center, 0))
            else:
                cx = 0.5 * (ob.rect_min[0] + ob.rect_max[0])
                cy = 0.5 * (ob.rect_min[1] + ob.rect_max[1])
                poses.append(ObstaclePose((cx, cy), 0))
        return cls(spec, robot if robot is not None else spec.start, tuple(poses), 0.0)

    def step(self, cmd: VelocityCommand) -> "World":
        """Advance robot and obstacles by one control interval.

        The command is clamped to the speed limits (acceleration limits are
        the planner's job); robot and obstacles move in lockstep from the
        pre-step state.
        """
        lim = self.spec.limits
        clamped = VelocityCommand(clamp(cmd.v, 0.0, lim.v_max),
                                  clamp(cmd.omega, -lim.omega_max, lim.omega_max))
        nxt = step_kinematics(self.robot, clamped, self.spec.dt)
        return replace(self, robot=nxt,
                       obstacles=advance_obstacle_poses(self.spec.obstacles, self.obstacles, self.spec.dt),
                       time=self.time + self.spec.dt)


def step_kinematics(state: RobotState, cmd: VelocityCommand, dt: float) -> RobotState:
    """One explicit-Euler step of the unicycle model.

    x' = x + v cos(theta) dt, y' = y + v sin(theta) dt,
    theta' = wrap(theta + omega dt); the returned velocities are the
    command's.
    """
    if not (math.isfinite(state.x) and math.isfinite(state.y) and math.isfinite(state.theta)
            and math.isfinite(cmd.v) and math.isfinite(cmd.omega)):
        raise ValueError("non-finite state or command")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return RobotState(
        state.x + cmd.v * math.cos(state.theta) * dt,
        state.y + cmd.v * math.sin(state.theta) * dt,
        normalize_angle(state.theta + cmd.omega * dt),
        cmd.v,
        cmd.omega,
    )


def _advance_dynamic(ob: Obstacle, pose: ObstaclePose, dt: float) -> ObstaclePose:
    cx, cy = pose.center
    n = len(ob.waypoints)
    wx, wy = ob.waypoints[pose.target]
    dist = math.hypot(wx - cx, wy - cy)
    step = ob.speed * dt
    if dist <= step:
        # arrival: snap onto the waypoint and retarget the next one
        if pose.target == n - 1 and not ob.loop:
            return ObstaclePose((wx, wy), pose.target)
        return ObstaclePose((wx, wy), (pose.target + 1) % n)
    ux = (wx - cx) / dist
    uy = (wy - cy) / dist
    return ObstaclePose((cx + ux * step, cy + uy * step), pose.target)


def advance_obstacle_poses(obstacles: tuple[Obstacle, ...], poses: tuple[ObstaclePose, ...],
                           dt: float) -> tuple[ObstaclePose, ...]:
    """Move every dynamic obstacle toward its waypoint; statics unchanged."""
    out = []
    for ob, pose in zip(obstacles, poses):
        out.append(_advance_dynamic(ob, pose, dt) if ob.kind == "dynamic" else pose)
    return tuple(out)


def advance_obstacles(world: World, dt: float) -> tuple[ObstaclePose, ...]:
    return advance_obstacle_poses(world.spec.obstacles, world.obstacles, dt)


def obstacle_surface_distance(x: float, y: float, ob: Obstacle, pose: ObstaclePose) -> float:
    """Distance from a point to the obstacle boundary (negative inside circles, 0 inside rects)."""
    if ob.shape == "circle":
        cx, cy = pose.center
        return math.hypot(x - cx, y - cy) - ob.radius
    return point_rect_distance(x, y, ob.rect_min[0], ob.rect_min[1], ob.rect_max[0], ob.rect_max[1])


def min_obstacle_distance(x: float, y: float, obstacles: tuple[Obstacle, ...],
                          poses: tuple[ObstaclePose, ...]) -> float:
    """Distance to the nearest obstacle surface; +inf when there are none."""
    best = math.inf
    for ob, pose in zip(obstacles, poses):
        d = obstacle_surface_distance(x, y, ob, pose)
        if d < best:
            best = d
    return best


def check_collision(state: RobotState, world: World) -> bool:
    """True iff the robot disc touches or overlaps any obstacle or a wall."""
    spec = world.spec
    r = spec.robot_radius
    w, h = spec.bounds
    if state.x - r <= 0.0 or state.x + r >= w or state.y - r <= 0.0 or state.y + r >= h:
        return True
    return min_obstacle_distance(state.x, state.y, spec.obstacles, world.obstacles) <= r


def goal_reached(state: RobotState, world: World) -> bool:
    """True iff the robot center is within goal_radius of the goal (inclusive)."""
    gx, gy = world.spec.goal
    return math.hypot(state.x - gx, state.y - gy) <= world.spec.goal_radius


def validate_spec(spec: WorldSpec) -> None:
    """Check every WorldSpec invariant; raises ValueError on the first violation."""
    w, h = spec.bounds
    if not (w > 0.0 and h > 0.0):
        raise ValueError("bounds must be positive")
    if not spec.dt > 0.0:
        raise ValueError("dt must be positive")
    if not spec.goal_radius > 0.0:
        raise ValueError("goal_radius must be positive")
    if not spec.robot_radius > 0.0:
        raise ValueError("robot_radius must be positive")
    lim = spec.limits
    if not (lim.v_max > 0.0 and lim.omega_max > 0.0 and lim.a_max > 0.0 and lim.alpha_max > 0.0):
        raise ValueError("limits must be positive")
    for ob in spec.obstacles:
        validate_obstacle(ob)
    if not (0.0 < spec.start.x < w and 0.0 < spec.start.y < h):
        raise ValueError("start pose outside bounds")
    if not (0.0 < spec.goal[0] < w and 0.0 < spec.goal[1] < h):
        raise ValueError("goal outside bounds")
    world0 = World.from_spec(spec)
    if check_collision(spec.start, world0):
        raise ValueError("start pose is in collision")
    # goal clearance is checked against walls and static obstacles only;
    # dynamic obstacles sweep past the goal without invalidating it
    r = spec.robot_radius
    if spec.goal[0] - r <= 0.0 or spec.goal[0] + r >= w or spec.goal[1] - r <= 0.0 or spec.goal[1] + r >= h:
        raise ValueError("goal is in collision with a wall")
    for ob, pose in zip(spec.obstacles, world0.obstacles):
        if ob.kind == "static" and obstacle_surface_distance(spec.goal[0], spec.goal[1], ob, pose) <= r:
            raise ValueError("goal is in collision with a static obstacle")
