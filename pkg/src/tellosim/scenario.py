"""Seeded random scenario generation.

Placement rules: the landing platform and the drone start are uniform
over the floor with uniform yaw, the obstacle count is uniform over
0..max_obstacles, and each obstacle's three edge lengths are uniform over
(0, max_edge]. Obstacles stand on the floor. Draws that violate the scene
invariants (anything poking outside the room, or a cuboid overlapping the
platform or start footprint) are re-sampled; obstacles may overlap each
other. A minimum start-to-platform distance of 0.30 m keeps the optimal
path nonempty.

The draw order below is part of the reproducibility contract: platform
(cx, cy, yaw), start (x, y, yaw), obstacle count, then per obstacle
(ex, ey, ez, cx, cy, yaw).
"""

from __future__ import annotations

import math
from .drone import DRONE_HALF_EXTENTS
from .geometry import Pose, Vec3, obb_footprints_overlap
from .rng import Rng
from .scene import Cuboid, LandingPlatform, RoomDims, Scene

MIN_START_PLATFORM_DISTANCE_M = 0.30
DEFAULT_MAX_ATTEMPTS = 1000


class PlacementExhaustedError(RuntimeError):
    """Re-sampling failed to satisfy the scene invariants."""


def _platform_in_room(cx: float, cy: float, yaw: float, room: RoomDims, side: float) -> bool:
    half = side / 2.0
    c = math.cos(yaw)
    s = math.sin(yaw)
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            x = cx + sx * half * c - sy * half * s
            y = cy + sx * half * s + sy * half * c
            if not room.contains_xy(x, y):
                return False
    return True


def generate_scenario(rng: Rng, max_obstacles: int = 10, max_edge: float = 2.0,
                      room: RoomDims = RoomDims(),
                      max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> Scene:
    """Pure function of (rng seed, parameters): repeated calls with the
    same seed produce identical scenes."""
    if max_edge > min(room.w, room.d, room.h):
        raise ValueError("max_edge must not exceed the smallest room dimension")
    if max_obstacles < 0:
        raise ValueError("max_obstacles must be nonnegative")

    for _ in range(max_attempts):
        cx = rng.uniform(0.0, room.w)
        cy = rng.uniform(0.0, room.d)
        pyaw = rng.angle()
        if _platform_in_room(cx, cy, pyaw, room, 0.60):
            platform = LandingPlatform.on_floor(cx, cy, pyaw)
            break
    else:
        raise PlacementExhaustedError("could not place landing platform")

    hx, hy = DRONE_HALF_EXTENTS.x, DRONE_HALF_EXTENTS.y
    half = platform.side / 2.0
    for _ in range(max_attempts):
        sx = rng.uniform(0.0, room.w)
        sy = rng.uniform(0.0, room.d)
        syaw = rng.angle()
        if not _footprint_xy_in_room(sx, sy, syaw, hx, hy, room):
            continue
        if math.hypot(sx - platform.center.x, sy - platform.center.y) < MIN_START_PLATFORM_DISTANCE_M:
            continue
        if obb_footprints_overlap(sx, sy, syaw, hx, hy,
                                  platform.center.x, platform.center.y, platform.yaw, half, half):
            continue
        start = Pose(Vec3(sx, sy, 0.0), syaw)
        break
    else:
        raise PlacementExhaustedError("could not place drone start")

    count = rng.randint(max_obstacles + 1)
    cuboids = []
    for _ in range(count):
        for _ in range(max_attempts):
            ex = rng.uniform(0.0, max_edge) / 2.0
            ey = rng.uniform(0.0, max_edge) / 2.0
            ez = rng.uniform(0.0, max_edge) / 2.0
            if min(ex, ey, ez) <= 0.0:
                continue
            ox = rng.uniform(0.0, room.w)
            oy = rng.uniform(0.0, room.d)
            oyaw = rng.angle()
            cub = Cuboid(Vec3(ox, oy, ez), oyaw, Vec3(ex, ey, ez))
            if not cub.footprint_corners_in_room(room):
                continue
            if 2.0 * ez > room.h:
                continue
            if obb_footprints_overlap(ox, oy, oyaw, ex, ey,
                                      platform.center.x, platform.center.y,
                                      platform.yaw, half, half):
                continue
            if obb_footprints_overlap(ox, oy, oyaw, ex, ey, sx, sy, syaw, hx, hy):
                continue
            cuboids.append(cub)
            break
        else:
            raise PlacementExhaustedError("could not place obstacle")

    scene = Scene(room=room, platform=platform, cuboids=tuple(cuboids), drone_start=start)
    scene.validate()
    return scene


def _footprint_xy_in_room(x: float, y: float, yaw: float,
                          hx: float, hy: float, room: RoomDims) -> bool:
    c = math.cos(yaw)
    s = math.sin(yaw)
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            px = x + sx * hx * c - sy * hy * s
            py = y + sx * hx * s + sy * hy * c
            if not room.contains_xy(px, py):
                return False
    return True


def scenario_is_solvable(scene: Scene, planner_cfg=None) -> bool:
    """True iff the planner finds a path from the scene's start pose."""
    from .drone import DroneState
    from .planner import PlannerConfig, optimal_flight_path

    cfg = planner_cfg if planner_cfg is not None else PlannerConfig()
    start = DroneState.at_start(scene)
    return optimal_flight_path(scene, start, cfg).found


def solvable_scenario(rng: Rng, max_obstacles: int = 10, max_edge: float = 2.0,
                      room: RoomDims = RoomDims(), planner_cfg=None,
                      max_attempts: int = DEFAULT_MAX_ATTEMPTS):
    """Generate scenes until the planner can solve one; returns
    (scene, plan). Used by dataset generation and the flight harness."""
    from .drone import DroneState
    from .planner import PlannerConfig, optimal_flight_path

    cfg = planner_cfg if planner_cfg is not None else PlannerConfig()
    for _ in range(max_attempts):
        scene = generate_scenario(rng, max_obstacles, max_edge, room)
        plan = optimal_flight_path(scene, DroneState.at_start(scene), cfg)
        if plan.found:
            return scene, plan
    raise PlacementExhaustedError("no solvable scenario found")
