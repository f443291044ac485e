"""Geometry primitives: vectors, poses, and scalar ray casting.

World frame is right-handed with z up; the floor is the z = 0 plane and
the drone body +x axis is its forward direction. Yaw is the rotation of
the body frame about world z, normalized to [0, 2*pi).

The ray functions here are scalar and tuned for the planner's inner loop
(five short rays per candidate move). The camera renderer has its own
vectorized implementation; the two are cross-checked in tests.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Tuple

TWO_PI = 2.0 * math.pi
INF = math.inf


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def add(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def sub(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


class Pose(NamedTuple):
    position: Vec3
    yaw: float  # radians, [0, 2*pi)


def normalize_yaw(yaw: float) -> float:
    return yaw % TWO_PI


def yaw_distance(a: float, b: float) -> float:
    """Smallest absolute angular difference between two yaws."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def rotate_body_to_world(v: Vec3, yaw: float) -> Vec3:
    """Rotate a body-frame vector into the world frame (rotation about z)."""
    c = math.cos(yaw)
    s = math.sin(yaw)
    return Vec3(c * v.x - s * v.y, s * v.x + c * v.y, v.z)


def horizontal_distance(a: Vec3, b: Vec3) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def euclidean_distance(a: Vec3, b: Vec3) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


class Hit(NamedTuple):
    distance: float
    surface: Tuple
    normal: Vec3


class Box(NamedTuple):
    """Yaw-rotated box in world coordinates, precomputed for ray tests."""

    cx: float
    cy: float
    cz: float
    cos_yaw: float
    sin_yaw: float
    hx: float
    hy: float
    hz: float

    @classmethod
    def make(cls, center: Vec3, yaw: float, half_extents: Vec3) -> "Box":
        return cls(
            center.x, center.y, center.z,
            math.cos(yaw), math.sin(yaw),
            half_extents.x, half_extents.y, half_extents.z,
        )


def ray_box(ox: float, oy: float, oz: float,
            dx: float, dy: float, dz: float,
            b: Box) -> Optional[Tuple[float, float]]:
    """Slab test against a yaw-rotated box.

    Returns (t_enter, t_exit) of the ray/box overlap interval, or None.
    The interval is not clipped to t >= 0; callers decide how to treat
    origins inside the box.
    """
    c = b.cos_yaw
    s = b.sin_yaw
    rx = ox - b.cx
    ry = oy - b.cy
    # rotate into box frame (inverse yaw rotation)
    px = c * rx + s * ry
    py = -s * rx + c * ry
    pz = oz - b.cz
    qx = c * dx + s * dy
    qy = -s * dx + c * dy
    qz = dz

    tmin = -INF
    tmax = INF
    for p, q, h in ((px, qx, b.hx), (py, qy, b.hy), (pz, qz, b.hz)):
        if q == 0.0:
            if p < -h or p > h:
                return None
        else:
            inv = 1.0 / q
            t1 = (-h - p) * inv
            t2 = (h - p) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            if tmin > tmax:
                return None
    return tmin, tmax


def ray_box_hit(origin: Vec3, direction: Vec3, b: Box) -> Optional[Hit]:
    """Nearest nonnegative hit on a box, with outward unit normal.

    A ray starting inside the box reports the exit face.
    """
    span = ray_box(origin.x, origin.y, origin.z,
                   direction.x, direction.y, direction.z, b)
    if span is None:
        return None
    tmin, tmax = span
    if tmax < 0.0:
        return None
    t = tmin if tmin >= 0.0 else tmax
    # face from the hit point in box coordinates
    hx_w = origin.x + t * direction.x - b.cx
    hy_w = origin.y + t * direction.y - b.cy
    px = b.cos_yaw * hx_w + b.sin_yaw * hy_w
    py = -b.sin_yaw * hx_w + b.cos_yaw * hy_w
    pz = origin.z + t * direction.z - b.cz
    ratios = (abs(px) / b.hx, abs(py) / b.hy, abs(pz) / b.hz)
    axis = ratios.index(max(ratios))
    if axis == 0:
        n_box = (math.copysign(1.0, px), 0.0, 0.0)
    elif axis == 1:
        n_box = (0.0, math.copysign(1.0, py), 0.0)
    else:
        n_box = (0.0, 0.0, math.copysign(1.0, pz))
    # rotate normal back to world
    nx = b.cos_yaw * n_box[0] - b.sin_yaw * n_box[1]
    ny = b.sin_yaw * n_box[0] + b.cos_yaw * n_box[1]
    return Hit(t, (), Vec3(nx, ny, n_box[2]))


def box_local_xy(point: Vec3, b: Box) -> Tuple[float, float]:
    """World point expressed in the box's rotated xy frame."""
    rx = point.x - b.cx
    ry = point.y - b.cy
    return (b.cos_yaw * rx + b.sin_yaw * ry, -b.sin_yaw * rx + b.cos_yaw * ry)


def obb_footprints_overlap(c1x: float, c1y: float, yaw1: float, h1x: float, h1y: float,
                           c2x: float, c2y: float, yaw2: float, h2x: float, h2y: float) -> bool:
    """Separating-axis test for two rotated rectangles in the floor plane."""
    axes = []
    for yaw in (yaw1, yaw2):
        c = math.cos(yaw)
        s = math.sin(yaw)
        axes.append((c, s))
        axes.append((-s, c))

    def radius(ax: float, ay: float, yaw: float, hx: float, hy: float) -> float:
        c = math.cos(yaw)
        s = math.sin(yaw)
        # projections of the rectangle's own axes onto (ax, ay)
        return hx * abs(ax * c + ay * s) + hy * abs(-ax * s + ay * c)

    dx = c2x - c1x
    dy = c2y - c1y
    for ax, ay in axes:
        dist = abs(dx * ax + dy * ay)
        if dist > radius(ax, ay, yaw1, h1x, h1y) + radius(ax, ay, yaw2, h2x, h2y):
            return False
    return True
