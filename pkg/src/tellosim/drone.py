"""Tello-style flight command executor.

Five discrete commands drive the drone: takeoff, land, forward 0.20 m,
rotate clockwise 10 degrees, rotate counter-clockwise 10 degrees. Takeoff
is only valid on a surface; the other four only in the air. Two executors
share these rules: `execute_simple` teleports the drone to the target
pose after a swept collision check, `execute_velocity` additionally plays
out a constant-acceleration velocity profile (triangular for short moves,
trapezoidal once the speed cap is reached) and reports per-step samples
to an observer. Both end in the same pose.

Sensors mimic the Tello read commands that matter here: height above the
takeoff point, straight-line distance from it, and the count of executed
commands (flight-time stand-in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Callable, NamedTuple, Optional, Tuple

from .geometry import (
    Pose,
    Vec3,
    euclidean_distance,
    normalize_yaw,
    rotate_body_to_world,
)
from .scene import Scene, nearest_hit_distance, segment_blocked


class FlightCommand(IntEnum):
    TAKEOFF = 0
    LAND = 1
    FORWARD = 2
    CW = 3
    CCW = 4


COMMAND_NAMES = ("takeoff", "land", "forward", "cw", "ccw")
COMMAND_BY_NAME = {name: FlightCommand(i) for i, name in enumerate(COMMAND_NAMES)}

FORWARD_STEP_M = 0.20
TURN_STEP_RAD = math.radians(10.0)

DRONE_HALF_EXTENTS = Vec3(0.09, 0.09, 0.025)
DEFAULT_TAKEOFF_ALTITUDE_M = 0.50


class CommandStatus(Enum):
    MOVED = "moved"
    CRASHED = "crashed"
    INVALID = "invalid"


class CommandResult(NamedTuple):
    status: CommandStatus
    new_pose: Pose


class SensorReading(NamedTuple):
    height_m: float
    tof_m: float
    cmd_count: int


@dataclass
class DroneState:
    """Single-owner mutable drone state.

    `pose.position` is the center of the collision box; a drone resting on
    a surface sits with its center one half-height above it.
    """

    pose: Pose
    airborne: bool = False
    takeoff_pose: Pose = None  # type: ignore[assignment]
    commands_executed: int = 0
    collision_half_extents: Vec3 = DRONE_HALF_EXTENTS
    takeoff_altitude: float = DEFAULT_TAKEOFF_ALTITUDE_M

    def __post_init__(self) -> None:
        if self.takeoff_pose is None:
            self.takeoff_pose = self.pose

    @classmethod
    def at_start(cls, scene: Scene, **kwargs) -> "DroneState":
        """Drone resting on the floor at the scene's start pose."""
        start = scene.drone_start
        hz = kwargs.get("collision_half_extents", DRONE_HALF_EXTENTS).z
        pose = Pose(Vec3(start.position.x, start.position.y, hz), normalize_yaw(start.yaw))
        return cls(pose=pose, **kwargs)

    def copy(self) -> "DroneState":
        return replace(self)


def read_sensors(state: DroneState) -> SensorReading:
    """Height and straight-line distance from the takeoff point (meters)
    plus the number of commands executed so far."""
    p = state.pose.position
    t = state.takeoff_pose.position
    height = abs(p.z - t.z)
    tof = euclidean_distance(p, t)
    return SensorReading(height, tof, state.commands_executed)


def _motion_frame(direction: Vec3, yaw: float, he: Vec3) -> Tuple[Vec3, Vec3, float, float]:
    """Two unit vectors spanning the motion cross-section and their
    half-extent magnitudes (lateral, normal)."""
    if abs(direction.z) < 0.99:
        lateral = Vec3(0.0, 0.0, 1.0).cross(direction).normalized()
        upward = direction.cross(lateral).normalized()
        return lateral, upward, he.y, he.z
    # vertical motion: cross-section is the drone footprint
    bx = rotate_body_to_world(Vec3(1.0, 0.0, 0.0), yaw)
    by = rotate_body_to_world(Vec3(0.0, 1.0, 0.0), yaw)
    return bx, by, he.x, he.y


def path_clear(state: DroneState, scene: Scene, target: Vec3) -> bool:
    """Swept check with 5 parallel rays: body center plus the four
    cross-section corners offset by the collision half extents."""
    pos = state.pose.position
    delta = target.sub(pos)
    length = delta.norm()
    if length == 0.0:
        return True
    direction = delta.scale(1.0 / length)
    u, v, hu, hv = _motion_frame(direction, state.pose.yaw, state.collision_half_extents)
    dx, dy, dz = direction
    for su, sv in ((0.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)):
        ox = pos.x + su * hu * u.x + sv * hv * v.x
        oy = pos.y + su * hu * u.y + sv * hv * v.y
        oz = pos.z + su * hu * u.z + sv * hv * v.z
        if segment_blocked(scene, ox, oy, oz, dx, dy, dz, length):
            return False
    return True


def support_drop(state: DroneState, scene: Scene) -> float:
    """Distance the drone can descend before its underside rests on the
    first support surface (platform top, obstacle top, or floor)."""
    pos = state.pose.position
    he = state.collision_half_extents
    c = math.cos(state.pose.yaw)
    s = math.sin(state.pose.yaw)
    down = Vec3(0.0, 0.0, -1.0)
    best = math.inf
    for sx, sy in ((0.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)):
        ox = pos.x + sx * he.x * c - sy * he.y * s
        oy = pos.y + sx * he.x * s + sy * he.y * c
        d = nearest_hit_distance(scene, Vec3(ox, oy, pos.z), down)
        if d < best:
            best = d
    drop = best - he.z
    return drop if drop > 0.0 else 0.0


def _invalid(state: DroneState) -> CommandResult:
    return CommandResult(CommandStatus.INVALID, state.pose)


def _crashed(state: DroneState) -> CommandResult:
    return CommandResult(CommandStatus.CRASHED, state.pose)


def _plan_motion(state: DroneState, scene: Scene, cmd: FlightCommand):
    """Validity rules shared by both executors.

    Returns (kind, payload) where kind is one of "invalid", "crashed",
    "turn" (payload: signed yaw delta) or "move" (payload: target Vec3,
    lands: bool).
    """
    pos = state.pose.position
    if cmd == FlightCommand.TAKEOFF:
        if state.airborne:
            return "invalid", None
        target = Vec3(pos.x, pos.y, pos.z + state.takeoff_altitude)
        if not path_clear(state, scene, target):
            return "crashed", None
        return "move", (target, False)
    if not state.airborne:
        return "invalid", None
    if cmd == FlightCommand.LAND:
        drop = support_drop(state, scene)
        return "move", (Vec3(pos.x, pos.y, pos.z - drop), True)
    if cmd == FlightCommand.FORWARD:
        step = rotate_body_to_world(Vec3(FORWARD_STEP_M, 0.0, 0.0), state.pose.yaw)
        target = pos.add(step)
        if not path_clear(state, scene, target):
            return "crashed", None
        return "move", (target, False)
    if cmd == FlightCommand.CW:
        return "turn", -TURN_STEP_RAD
    if cmd == FlightCommand.CCW:
        return "turn", TURN_STEP_RAD
    raise ValueError(f"unknown command {cmd!r}")


def _apply_final(state: DroneState, cmd: FlightCommand, kind: str, payload) -> CommandResult:
    if kind == "turn":
        new_pose = Pose(state.pose.position, normalize_yaw(state.pose.yaw + payload))
    else:
        target, lands = payload
        new_pose = Pose(target, state.pose.yaw)
        if cmd == FlightCommand.TAKEOFF:
            state.takeoff_pose = state.pose
            state.airborne = True
        elif lands:
            state.airborne = False
    state.pose = new_pose
    state.commands_executed += 1
    return CommandResult(CommandStatus.MOVED, new_pose)


def execute_simple(state: DroneState, scene: Scene, cmd: FlightCommand) -> CommandResult:
    """Teleport executor: collision-check the move, then set the pose."""
    kind, payload = _plan_motion(state, scene, cmd)
    if kind == "invalid":
        return _invalid(state)
    if kind == "crashed":
        return _crashed(state)
    return _apply_final(state, cmd, kind, payload)


# ---------------------------------------------------------------------------
# Velocity executor

@dataclass(frozen=True)
class MotionProfileConfig:
    v_max: float = 0.5          # m/s
    a: float = 1.0              # m/s^2
    omega_max: float = math.pi / 2.0  # rad/s
    alpha: float = math.pi      # rad/s^2
    dt: float = 1.0 / 240.0     # s

    def validate(self) -> None:
        if min(self.v_max, self.a, self.omega_max, self.alpha, self.dt) <= 0.0:
            raise ValueError("motion profile parameters must be positive")


def profile_is_triangular(distance: float, v_max: float, a: float) -> bool:
    """Short moves never reach v_max. The boundary distance v_max^2 / a
    is classified triangular (peak exactly v_max, zero cruise)."""
    return distance <= v_max * v_max / a


def profile_duration(distance: float, v_max: float, a: float) -> float:
    if distance <= 0.0:
        return 0.0
    if profile_is_triangular(distance, v_max, a):
        return 2.0 * math.sqrt(distance / a)
    t_ramp = v_max / a
    cruise = (distance - v_max * v_max / a) / v_max
    return 2.0 * t_ramp + cruise


def profile_state(t: float, distance: float, v_max: float, a: float) -> Tuple[float, float]:
    """Traveled distance and speed at time t along the profile."""
    total = profile_duration(distance, v_max, a)
    if t <= 0.0:
        return 0.0, 0.0
    if t >= total:
        return distance, 0.0
    if profile_is_triangular(distance, v_max, a):
        t_half = total / 2.0
        if t <= t_half:
            return 0.5 * a * t * t, a * t
        rem = total - t
        return distance - 0.5 * a * rem * rem, a * rem
    t_ramp = v_max / a
    d_ramp = 0.5 * v_max * v_max / a
    if t <= t_ramp:
        return 0.5 * a * t * t, a * t
    if t <= total - t_ramp:
        return d_ramp + v_max * (t - t_ramp), v_max
    rem = total - t
    return distance - 0.5 * a * rem * rem, a * rem


Observer = Callable[[float, Pose, float], None]


def execute_velocity(state: DroneState, scene: Scene, cmd: FlightCommand,
                     cfg: MotionProfileConfig = MotionProfileConfig(),
                     observer: Optional[Observer] = None) -> CommandResult:
    """Profile executor: same validity and collision rules as
    `execute_simple`, with per-dt pose/speed samples along the move."""
    cfg.validate()
    kind, payload = _plan_motion(state, scene, cmd)
    if kind == "invalid":
        return _invalid(state)
    if kind == "crashed":
        return _crashed(state)

    start_pose = state.pose
    if kind == "turn":
        distance = abs(payload)
        sign = math.copysign(1.0, payload)
        v_cap, accel = cfg.omega_max, cfg.alpha

        def pose_at(traveled: float) -> Pose:
            return Pose(start_pose.position, normalize_yaw(start_pose.yaw + sign * traveled))
    else:
        target, _lands = payload
        delta = target.sub(start_pose.position)
        distance = delta.norm()
        axis = delta.scale(1.0 / distance) if distance > 0.0 else Vec3(0.0, 0.0, 0.0)
        v_cap, accel = cfg.v_max, cfg.a

        def pose_at(traveled: float) -> Pose:
            return Pose(start_pose.position.add(axis.scale(traveled)), start_pose.yaw)

    if observer is not None:
        total = profile_duration(distance, v_cap, accel)
        k = 1
        while True:
            t = k * cfg.dt
            if t >= total:
                observer(total, pose_at(distance), 0.0)
                break
            traveled, speed = profile_state(t, distance, v_cap, accel)
            observer(t, pose_at(traveled), speed)
            k += 1

    return _apply_final(state, cmd, kind, payload)
