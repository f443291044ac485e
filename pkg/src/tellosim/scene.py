"""The simulated world: room, landing platform, obstacles, drone start.

Scenes are immutable after construction and safe to share across threads.
The room is an axis-aligned 3.3 m x 3.3 m x 2.5 m box by default; the
landing platform is a thin 0.60 m square box resting on the floor so that
"landing on the platform" has a well-defined support height. Obstacles
are yaw-rotated cuboids.

The scene file format is JSON with keys room{w,d,h},
platform{cx,cy,yaw}, cuboids[{cx,cy,cz,yaw,ex,ey,ez,albedo}] and
drone_start{x,y,yaw}. Lengths are meters, angles radians, and ex/ey/ez
are half extents. Unknown fields are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .geometry import (
    Box,
    Hit,
    Pose,
    Vec3,
    obb_footprints_overlap,
    ray_box,
    ray_box_hit,
)

PLATFORM_SIDE = 0.60
PLATFORM_THICKNESS = 0.01

# Fixed surface reflectances used by the renderer.
FLOOR_ALBEDO = 0.75
WALL_ALBEDO = 0.85
CEILING_ALBEDO = 0.90
CUBOID_ALBEDO = 0.50
PLATFORM_WHITE = 0.95
PLATFORM_BLACK = 0.05


class SceneError(ValueError):
    """A scene violates its structural invariants."""


@dataclass(frozen=True)
class RoomDims:
    w: float = 3.3
    d: float = 3.3
    h: float = 2.5

    def validate(self) -> None:
        if not (self.w > 0 and self.d > 0 and self.h > 0):
            raise SceneError("room dimensions must be positive")

    def contains_xy(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.w and 0.0 <= y <= self.d

    def contains(self, p: Vec3) -> bool:
        return self.contains_xy(p.x, p.y) and 0.0 <= p.z <= self.h


@dataclass(frozen=True)
class Cuboid:
    center: Vec3
    yaw: float
    half_extents: Vec3
    albedo: float = CUBOID_ALBEDO

    def box(self) -> Box:
        return Box.make(self.center, self.yaw, self.half_extents)

    def volume(self) -> float:
        e = self.half_extents
        return 8.0 * e.x * e.y * e.z

    def footprint_corners_in_room(self, room: RoomDims) -> bool:
        c = math.cos(self.yaw)
        s = math.sin(self.yaw)
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                x = self.center.x + sx * self.half_extents.x * c - sy * self.half_extents.y * s
                y = self.center.y + sx * self.half_extents.x * s + sy * self.half_extents.y * c
                if not room.contains_xy(x, y):
                    return False
        return True


@dataclass(frozen=True)
class LandingPlatform:
    center: Vec3  # on the floor: center.z == thickness / 2
    yaw: float = 0.0
    side: float = PLATFORM_SIDE
    thickness: float = PLATFORM_THICKNESS

    @classmethod
    def on_floor(cls, cx: float, cy: float, yaw: float = 0.0) -> "LandingPlatform":
        return cls(Vec3(cx, cy, PLATFORM_THICKNESS / 2.0), yaw)

    @property
    def top_z(self) -> float:
        return self.center.z + self.thickness / 2.0

    def box(self) -> Box:
        half = Vec3(self.side / 2.0, self.side / 2.0, self.thickness / 2.0)
        return Box.make(self.center, self.yaw, half)

    def as_cuboid(self) -> Cuboid:
        half = Vec3(self.side / 2.0, self.side / 2.0, self.thickness / 2.0)
        return Cuboid(self.center, self.yaw, half, PLATFORM_WHITE)


@dataclass(frozen=True)
class Scene:
    room: RoomDims = field(default_factory=RoomDims)
    platform: LandingPlatform = field(default_factory=lambda: LandingPlatform.on_floor(1.65, 1.65))
    cuboids: Tuple[Cuboid, ...] = ()
    drone_start: Pose = Pose(Vec3(0.6, 0.6, 0.0), 0.0)  # z = 0 means resting on the floor
    # drone footprint half extents used by the overlap invariants
    start_half_xy: Tuple[float, float] = (0.09, 0.09)

    def validate(self) -> None:
        self.room.validate()
        if abs(self.platform.side - PLATFORM_SIDE) > 1e-12:
            raise SceneError("platform side must be 0.60 m")
        pb = self.platform.box()
        plat = self.platform
        half = plat.side / 2.0
        c = math.cos(plat.yaw)
        s = math.sin(plat.yaw)
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                x = plat.center.x + sx * half * c - sy * half * s
                y = plat.center.y + sx * half * s + sy * half * c
                if not self.room.contains_xy(x, y):
                    raise SceneError("platform footprint outside room")
        start = self.drone_start
        if not self.room.contains_xy(start.position.x, start.position.y):
            raise SceneError("drone start outside room")
        if start.position.z != 0.0:
            raise SceneError("drone start must rest on the floor (z = 0)")
        hx, hy = self.start_half_xy
        for i, cub in enumerate(self.cuboids):
            e = cub.half_extents
            if not (e.x > 0 and e.y > 0 and e.z > 0):
                raise SceneError(f"cuboid {i} has nonpositive half extents")
            if not (0.0 <= cub.albedo <= 1.0):
                raise SceneError(f"cuboid {i} albedo outside [0, 1]")
            if not cub.footprint_corners_in_room(self.room):
                raise SceneError(f"cuboid {i} footprint outside room")
            if cub.center.z - e.z < -1e-12 or cub.center.z + e.z > self.room.h + 1e-12:
                raise SceneError(f"cuboid {i} extends outside room vertically")
            if obb_footprints_overlap(cub.center.x, cub.center.y, cub.yaw, e.x, e.y,
                                      plat.center.x, plat.center.y, plat.yaw, half, half):
                raise SceneError(f"cuboid {i} overlaps platform footprint")
            if obb_footprints_overlap(cub.center.x, cub.center.y, cub.yaw, e.x, e.y,
                                      start.position.x, start.position.y, start.yaw, hx, hy):
                raise SceneError(f"cuboid {i} overlaps drone start footprint")
        _ = pb  # platform box construction doubles as a sanity check

    def solid_boxes(self) -> Tuple[Box, ...]:
        """Platform box followed by obstacle boxes (collision order)."""
        return (self.platform.box(),) + tuple(c.box() for c in self.cuboids)

    def total_cuboid_volume(self) -> float:
        return sum(c.volume() for c in self.cuboids)


# ---------------------------------------------------------------------------
# Scene-level ray queries (scalar; the renderer has a vectorized twin).

def ray_intersect(scene: Scene, origin: Vec3, direction: Vec3) -> Optional[Hit]:
    """Nearest nonnegative hit of a unit-direction ray against the scene.

    Surfaces are tagged ("floor",), ("ceiling",), ("wall", i) for walls at
    x=0, x=w, y=0, y=d, ("platform",) and ("cuboid", i). Normals are unit
    length and face outward from the solid (into the room for the shell).
    """
    n = direction.norm()
    if not math.isclose(n, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError("direction must be a unit vector")
    room = scene.room
    best_t = math.inf
    best: Optional[Hit] = None

    def consider(t: float, surface: Tuple, normal: Vec3) -> None:
        nonlocal best_t, best
        if 0.0 <= t < best_t:
            best_t = t
            best = Hit(t, surface, normal)

    if direction.z < 0.0:
        consider(-origin.z / direction.z, ("floor",), Vec3(0.0, 0.0, 1.0))
    elif direction.z > 0.0:
        consider((room.h - origin.z) / direction.z, ("ceiling",), Vec3(0.0, 0.0, -1.0))
    if direction.x < 0.0:
        consider(-origin.x / direction.x, ("wall", 0), Vec3(1.0, 0.0, 0.0))
    elif direction.x > 0.0:
        consider((room.w - origin.x) / direction.x, ("wall", 1), Vec3(-1.0, 0.0, 0.0))
    if direction.y < 0.0:
        consider(-origin.y / direction.y, ("wall", 2), Vec3(0.0, 1.0, 0.0))
    elif direction.y > 0.0:
        consider((room.d - origin.y) / direction.y, ("wall", 3), Vec3(0.0, -1.0, 0.0))

    hit = ray_box_hit(origin, direction, scene.platform.box())
    if hit is not None:
        consider(hit.distance, ("platform",), hit.normal)
    for i, cub in enumerate(scene.cuboids):
        hit = ray_box_hit(origin, direction, cub.box())
        if hit is not None:
            consider(hit.distance, ("cuboid", i), hit.normal)
    return best


def segment_blocked(scene: Scene, ox: float, oy: float, oz: float,
                    dx: float, dy: float, dz: float, length: float) -> bool:
    """True iff a scene surface lies strictly within `length` along the ray.

    (dx, dy, dz) must be unit length. Exploits room convexity: the shell
    blocks iff the endpoint leaves the room.
    """
    ex = ox + dx * length
    ey = oy + dy * length
    ez = oz + dz * length
    room = scene.room
    if not (0.0 <= ex <= room.w and 0.0 <= ey <= room.d and 0.0 <= ez <= room.h):
        return True
    for b in scene.solid_boxes():
        span = ray_box(ox, oy, oz, dx, dy, dz, b)
        if span is not None:
            tmin, tmax = span
            if tmax >= 0.0 and (tmin if tmin >= 0.0 else tmax) < length:
                return True
    return False


def nearest_hit_distance(scene: Scene, origin: Vec3, direction: Vec3) -> float:
    """Distance to the nearest surface, math.inf if none (cannot happen
    for origins inside the room)."""
    hit = ray_intersect(scene, origin, direction)
    return hit.distance if hit is not None else math.inf


# ---------------------------------------------------------------------------
# JSON scene files

def _require_keys(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise SceneError(f"unknown fields in {where}: {sorted(unknown)}")
    missing = allowed - set(d)
    if missing:
        raise SceneError(f"missing fields in {where}: {sorted(missing)}")


def scene_to_dict(scene: Scene) -> dict:
    return {
        "room": {"w": scene.room.w, "d": scene.room.d, "h": scene.room.h},
        "platform": {
            "cx": scene.platform.center.x,
            "cy": scene.platform.center.y,
            "yaw": scene.platform.yaw,
        },
        "cuboids": [
            {
                "cx": c.center.x, "cy": c.center.y, "cz": c.center.z,
                "yaw": c.yaw,
                "ex": c.half_extents.x, "ey": c.half_extents.y, "ez": c.half_extents.z,
                "albedo": c.albedo,
            }
            for c in scene.cuboids
        ],
        "drone_start": {
            "x": scene.drone_start.position.x,
            "y": scene.drone_start.position.y,
            "yaw": scene.drone_start.yaw,
        },
    }


def scene_from_dict(data: dict) -> Scene:
    if not isinstance(data, dict):
        raise SceneError("scene document must be a JSON object")
    _require_keys(data, {"room", "platform", "cuboids", "drone_start"}, "scene")
    _require_keys(data["room"], {"w", "d", "h"}, "room")
    _require_keys(data["platform"], {"cx", "cy", "yaw"}, "platform")
    _require_keys(data["drone_start"], {"x", "y", "yaw"}, "drone_start")
    room = RoomDims(float(data["room"]["w"]), float(data["room"]["d"]), float(data["room"]["h"]))
    platform = LandingPlatform.on_floor(
        float(data["platform"]["cx"]), float(data["platform"]["cy"]),
        float(data["platform"]["yaw"]),
    )
    cuboids = []
    for i, c in enumerate(data["cuboids"]):
        _require_keys(c, {"cx", "cy", "cz", "yaw", "ex", "ey", "ez", "albedo"}, f"cuboids[{i}]")
        cuboids.append(Cuboid(
            Vec3(float(c["cx"]), float(c["cy"]), float(c["cz"])),
            float(c["yaw"]),
            Vec3(float(c["ex"]), float(c["ey"]), float(c["ez"])),
            float(c["albedo"]),
        ))
    start = data["drone_start"]
    scene = Scene(
        room=room,
        platform=platform,
        cuboids=tuple(cuboids),
        drone_start=Pose(Vec3(float(start["x"]), float(start["y"]), 0.0), float(start["yaw"])),
    )
    scene.validate()
    return scene


def save_scene(scene: Scene, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scene_to_dict(scene), f, indent=2)
        f.write("\n")


def load_scene(path: str) -> Scene:
    with open(path, "r", encoding="utf-8") as f:
        return scene_from_dict(json.load(f))
