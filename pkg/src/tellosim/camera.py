"""Camera model and raycast renderer.

The camera is a pinhole with a 4:3 sensor. Manufacturers quote the
diagonal field of view; the projection needs the vertical one, related by

    vfov = 2 * atan((h / d) * tan(dfov / 2))

with h the image height and d the image diagonal. Five mounts are
supported: front (DFOV 82.6 deg, pitched 10 deg down), diagonal (45 deg
down), bottom (90 deg down), fisheye (DFOV 150 deg, 10 deg down) and
split, which stacks a downward half view on top of a forward half view
(the mirror trick). The pinhole projection is used for all of them,
including the 150-degree fisheye.

Rendering is a pure function: one ray per pixel center, nearest hit in
[near, far], Lambert shading with a fixed ambient term, and a procedural
marker (concentric black/white square rings) on the platform top. Rows
and pixels are evaluated with vectorized numpy; output is deterministic.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .geometry import Pose, Vec3, rotate_body_to_world
from .scene import (
    CEILING_ALBEDO,
    CUBOID_ALBEDO,
    FLOOR_ALBEDO,
    PLATFORM_BLACK,
    PLATFORM_WHITE,
    WALL_ALBEDO,
    Scene,
)

DEFAULT_NEAR_M = 0.05
DEFAULT_FAR_M = 5.0
DEFAULT_LIGHT_DIR = Vec3(0.3, 0.2, 1.0).normalized()
AMBIENT = 0.4
DIFFUSE = 0.6
MARKER_RINGS = 5

FRONT_DFOV_RAD = math.radians(82.6)
FISHEYE_DFOV_RAD = math.radians(150.0)

CAMERA_MODES = ("front", "diagonal", "bottom", "split", "fisheye")
_MODE_PITCH_DEG = {"front": 10.0, "diagonal": 45.0, "bottom": 90.0, "fisheye": 10.0}


def dfov_to_vfov(dfov: float, width: int, height: int) -> float:
    """Vertical from diagonal field of view, both in radians."""
    if not (0.0 < dfov < math.pi):
        raise ValueError("dfov must lie in (0, pi)")
    diag = math.hypot(width, height)
    return 2.0 * math.atan((height / diag) * math.tan(dfov / 2.0))


@dataclass(frozen=True)
class CameraIntrinsics:
    width: int = 160
    height: int = 120
    dfov: float = FISHEYE_DFOV_RAD
    near: float = DEFAULT_NEAR_M
    far: float = DEFAULT_FAR_M

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if 3 * self.width != 4 * self.height:
            raise ValueError("aspect ratio must be 4:3")
        if not (0.0 < self.near < self.far):
            raise ValueError("need 0 < near < far")
        if not (0.0 < self.dfov < math.pi):
            raise ValueError("dfov must lie in (0, pi)")

    @property
    def vfov(self) -> float:
        return dfov_to_vfov(self.dfov, self.width, self.height)


@dataclass(frozen=True)
class CameraMount:
    """Mounting of the camera on the drone body.

    The offset is in the body frame (defaults to 0.04 m ahead of the
    center, a Tello-scale guess); pitch and DFOV are fixed per mode.
    """

    mode: str = "fisheye"
    offset: Vec3 = Vec3(0.04, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.mode not in CAMERA_MODES:
            raise ValueError(f"unknown camera mode {self.mode!r}")

    @property
    def dfov(self) -> float:
        return FISHEYE_DFOV_RAD if self.mode == "fisheye" else FRONT_DFOV_RAD

    @property
    def pitch_down(self) -> float:
        if self.mode == "split":
            raise ValueError("split mode renders two passes; query pass pitches instead")
        return math.radians(_MODE_PITCH_DEG[self.mode])

    @property
    def split_pitches(self) -> Tuple[float, float]:
        """(downward pass, forward pass) pitches for split mode."""
        return (math.radians(90.0), math.radians(10.0))


@dataclass
class Image:
    width: int
    height: int
    pixels: bytes  # row-major grayscale, row 0 at the top
    depth: Optional[np.ndarray] = None  # float32 meters in [near, far]

    def __post_init__(self) -> None:
        if len(self.pixels) != self.width * self.height:
            raise ValueError("pixel buffer size mismatch")

    def pixel(self, px: int, py: int) -> int:
        return self.pixels[py * self.width + px]

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)


def view_basis(drone_pose: Pose, mount: CameraMount,
               pitch_down: Optional[float] = None) -> Tuple[Vec3, Vec3, Vec3]:
    """Camera eye, forward and up vectors in the world frame.

    Recomputed per capture: body +x is pitched down about body +y, then
    the whole basis is yawed into the world frame.
    """
    pitch = mount.pitch_down if pitch_down is None else pitch_down
    yaw = drone_pose.yaw
    eye = drone_pose.position.add(rotate_body_to_world(mount.offset, yaw))
    cp = math.cos(pitch)
    sp = math.sin(pitch)
    forward = rotate_body_to_world(Vec3(cp, 0.0, -sp), yaw)
    up = rotate_body_to_world(Vec3(sp, 0.0, cp), yaw)
    return eye, forward, up


def primary_ray(intrinsics: CameraIntrinsics, eye: Vec3, forward: Vec3, up: Vec3,
                px: int, py: int) -> Tuple[Vec3, Vec3]:
    """Unit ray through the center of pixel (px, py); py = 0 is the top row."""
    if not (0 <= px < intrinsics.width and 0 <= py < intrinsics.height):
        raise ValueError("pixel outside image")
    tan_v = math.tan(intrinsics.vfov / 2.0)
    tan_h = tan_v * intrinsics.width / intrinsics.height
    u = (2.0 * (px + 0.5) / intrinsics.width - 1.0) * tan_h
    v = (1.0 - 2.0 * (py + 0.5) / intrinsics.height) * tan_v
    right = forward.cross(up)
    d = Vec3(
        forward.x + u * right.x + v * up.x,
        forward.y + u * right.y + v * up.y,
        forward.z + u * right.z + v * up.z,
    )
    return eye, d.normalized()


def project_point(intrinsics: CameraIntrinsics, eye: Vec3, forward: Vec3, up: Vec3,
                  point: Vec3) -> Optional[Tuple[float, float]]:
    """Pinhole projection of a world point to pixel coordinates, or None
    if the point is behind the camera."""
    rel = point.sub(eye)
    right = forward.cross(up)
    zc = rel.dot(forward)
    if zc <= 0.0:
        return None
    tan_v = math.tan(intrinsics.vfov / 2.0)
    tan_h = tan_v * intrinsics.width / intrinsics.height
    u = rel.dot(right) / (zc * tan_h)
    v = rel.dot(up) / (zc * tan_v)
    px = (u + 1.0) * intrinsics.width / 2.0 - 0.5
    py = (1.0 - v) * intrinsics.height / 2.0 - 0.5
    return px, py


# ---------------------------------------------------------------------------
# Vectorized rendering core

def _ray_grid(width: int, height: int, vfov: float,
              forward: Vec3, up: Vec3) -> np.ndarray:
    tan_v = math.tan(vfov / 2.0)
    tan_h = tan_v * width / height
    us = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * tan_h
    vs = (1.0 - 2.0 * (np.arange(height) + 0.5) / height) * tan_v
    right = forward.cross(up)
    f = np.array(forward)
    r = np.array(right)
    u_ = np.array(up)
    dirs = (f[None, None, :]
            + us[None, :, None] * r[None, None, :]
            + vs[:, None, None] * u_[None, None, :])
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    return dirs.reshape(-1, 3)


def _box_intervals(eye: np.ndarray, dirs: np.ndarray, box) -> Tuple[np.ndarray, np.ndarray]:
    """(t_enter, t_exit) per ray for a yaw-rotated box; empty overlap is
    encoded as t_enter > t_exit."""
    c, s = box.cos_yaw, box.sin_yaw
    rel = eye - np.array([box.cx, box.cy, box.cz])
    p = np.array([c * rel[0] + s * rel[1], -s * rel[0] + c * rel[1], rel[2]])
    q = np.empty_like(dirs)
    q[:, 0] = c * dirs[:, 0] + s * dirs[:, 1]
    q[:, 1] = -s * dirs[:, 0] + c * dirs[:, 1]
    q[:, 2] = dirs[:, 2]
    half = np.array([box.hx, box.hy, box.hz])
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (-half - p) / q
        t2 = (half - p) / q
    lo = np.minimum(t1, t2)
    hi = np.maximum(t1, t2)
    # parallel rays: degenerate axis constrains only via the slab test
    parallel = q == 0.0
    inside = np.abs(p)[None, :] <= half[None, :]
    lo = np.where(parallel, np.where(inside, -np.inf, np.inf), lo)
    hi = np.where(parallel, np.where(inside, np.inf, -np.inf), hi)
    return lo.max(axis=1), hi.min(axis=1)


def _box_candidate_t(eye: np.ndarray, dirs: np.ndarray, box, near: float) -> np.ndarray:
    tmin, tmax = _box_intervals(eye, dirs, box)
    valid = tmin <= tmax
    t = np.where(tmin >= near, tmin, np.where(tmax >= near, tmax, np.inf))
    return np.where(valid, t, np.inf)


def _box_normals_and_local(eye: np.ndarray, dirs: np.ndarray, t: np.ndarray, box):
    """Outward normals and box-frame hit coordinates for selected rays."""
    pts = eye[None, :] + t[:, None] * dirs
    c, s = box.cos_yaw, box.sin_yaw
    rel = pts - np.array([box.cx, box.cy, box.cz])
    local = np.empty_like(rel)
    local[:, 0] = c * rel[:, 0] + s * rel[:, 1]
    local[:, 1] = -s * rel[:, 0] + c * rel[:, 1]
    local[:, 2] = rel[:, 2]
    ratios = np.abs(local) / np.array([box.hx, box.hy, box.hz])[None, :]
    axis = ratios.argmax(axis=1)
    sign = np.sign(np.take_along_axis(local, axis[:, None], axis=1))[:, 0]
    sign = np.where(sign == 0.0, 1.0, sign)
    n_local = np.zeros_like(local)
    np.put_along_axis(n_local, axis[:, None], sign[:, None], axis=1)
    normals = np.empty_like(n_local)
    normals[:, 0] = c * n_local[:, 0] - s * n_local[:, 1]
    normals[:, 1] = s * n_local[:, 0] + c * n_local[:, 1]
    normals[:, 2] = n_local[:, 2]
    return normals, local


def _marker_albedo(local_x: np.ndarray, local_y: np.ndarray, half_side: float) -> np.ndarray:
    """Concentric square rings on the platform top, outermost ring black."""
    band = half_side / MARKER_RINGS
    ring = np.minimum(
        (np.maximum(np.abs(local_x), np.abs(local_y)) / band).astype(np.int64),
        MARKER_RINGS - 1,
    )
    black = (MARKER_RINGS - 1 - ring) % 2 == 0
    return np.where(black, PLATFORM_BLACK, PLATFORM_WHITE)


def _render_pass(scene: Scene, width: int, height: int, vfov: float,
                 eye: Vec3, forward: Vec3, up: Vec3,
                 near: float, far: float, light: Vec3) -> Tuple[np.ndarray, np.ndarray]:
    dirs = _ray_grid(width, height, vfov, forward, up)
    n_rays = dirs.shape[0]
    o = np.array(eye)
    room = scene.room

    planes = (
        ((0.0, 0.0, 1.0), 0.0, 2, -1.0, FLOOR_ALBEDO),      # floor
        ((0.0, 0.0, -1.0), room.h, 2, 1.0, CEILING_ALBEDO),  # ceiling
        ((1.0, 0.0, 0.0), 0.0, 0, -1.0, WALL_ALBEDO),        # wall x=0
        ((-1.0, 0.0, 0.0), room.w, 0, 1.0, WALL_ALBEDO),     # wall x=w
        ((0.0, 1.0, 0.0), 0.0, 1, -1.0, WALL_ALBEDO),        # wall y=0
        ((0.0, -1.0, 0.0), room.d, 1, 1.0, WALL_ALBEDO),     # wall y=d
    )

    surface_t = []
    surface_meta = []  # (kind, payload)
    for normal, level, axis, approach_sign, albedo in planes:
        d_axis = dirs[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (level - o[axis]) / d_axis
        t = np.where((d_axis * approach_sign > 0.0) & (t >= near), t, np.inf)
        surface_t.append(t)
        surface_meta.append(("plane", (np.array(normal), albedo)))

    boxes = [("platform", scene.platform.box(), None)]
    for cub in scene.cuboids:
        boxes.append(("cuboid", cub.box(), cub.albedo))
    for kind, box, albedo in boxes:
        surface_t.append(_box_candidate_t(o, dirs, box, near))
        surface_meta.append((kind, (box, albedo)))

    all_t = np.stack(surface_t, axis=0)
    winner = all_t.argmin(axis=0)
    t_hit = np.take_along_axis(all_t, winner[None, :], axis=0)[0]
    lit = np.isfinite(t_hit) & (t_hit <= far)

    l = np.array(light)
    gray = np.zeros(n_rays)
    for si, (kind, payload) in enumerate(surface_meta):
        mask = lit & (winner == si)
        if not mask.any():
            continue
        if kind == "plane":
            normal, albedo = payload
            ndotl = max(0.0, float(normal @ l))
            gray[mask] = albedo * (AMBIENT + DIFFUSE * ndotl)
        else:
            box, albedo = payload
            normals, local = _box_normals_and_local(o, dirs[mask], t_hit[mask], box)
            ndotl = np.maximum(0.0, normals @ l)
            if kind == "platform":
                alb = np.full(mask.sum(), PLATFORM_WHITE)
                top = normals[:, 2] > 0.5
                if top.any():
                    alb[top] = _marker_albedo(
                        local[top, 0], local[top, 1], scene.platform.side / 2.0)
            else:
                alb = np.full(mask.sum(), albedo)
            gray[mask] = alb * (AMBIENT + DIFFUSE * ndotl)

    shade = np.clip(np.rint(gray * 255.0), 0, 255).astype(np.uint8)
    shade[~lit] = 0
    depth = np.clip(np.where(lit, t_hit, far), near, far).astype(np.float32)
    return shade.reshape(height, width), depth.reshape(height, width)


def render(scene: Scene, intrinsics: CameraIntrinsics, mount: CameraMount,
           drone_pose: Pose, light_dir: Vec3 = DEFAULT_LIGHT_DIR) -> Image:
    """Grayscale + depth render from the drone's camera. In split mode
    the top half of the output is the downward view and the bottom half
    the forward view; other modes are a single full-frame pass."""
    w, h = intrinsics.width, intrinsics.height
    if mount.mode == "split":
        if h % 2 != 0:
            raise ValueError("split mode needs an even image height")
        half_h = h // 2
        vfov = dfov_to_vfov(mount.dfov, w, half_h)
        down_pitch, front_pitch = mount.split_pitches
        passes = []
        for pitch in (down_pitch, front_pitch):
            eye, fwd, up = view_basis(drone_pose, mount, pitch_down=pitch)
            passes.append(_render_pass(scene, w, half_h, vfov, eye, fwd, up,
                                       intrinsics.near, intrinsics.far, light_dir))
        shade = np.vstack([passes[0][0], passes[1][0]])
        depth = np.vstack([passes[0][1], passes[1][1]])
    else:
        eye, fwd, up = view_basis(drone_pose, mount)
        shade, depth = _render_pass(scene, w, h, intrinsics.vfov, eye, fwd, up,
                                    intrinsics.near, intrinsics.far, light_dir)
    return Image(w, h, shade.tobytes(), depth)


# ---------------------------------------------------------------------------
# Export formats

def write_pgm(image: Image, path: str) -> None:
    """Binary PGM (P5, maxval 255)."""
    with open(path, "wb") as f:
        f.write(f"P5\n{image.width} {image.height}\n255\n".encode("ascii"))
        f.write(image.pixels)


def read_pgm(path: str) -> Image:
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM file")
    parts = data.split(b"\n", 3)
    width, height = (int(v) for v in parts[1].split())
    if int(parts[2]) != 255:
        raise ValueError("unsupported maxval")
    return Image(width, height, parts[3][: width * height])


DEPTH_MAGIC = b"DPT1"


def write_depth(image: Image, path: str) -> None:
    """Little-endian float32 raster with a 16-byte header."""
    if image.depth is None:
        raise ValueError("image carries no depth buffer")
    with open(path, "wb") as f:
        f.write(DEPTH_MAGIC)
        f.write(struct.pack("<HH", image.width, image.height))
        f.write(b"\x00" * 8)
        f.write(image.depth.astype("<f4").tobytes())


def read_depth(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        header = f.read(16)
        if header[:4] != DEPTH_MAGIC:
            raise ValueError("bad depth magic")
        w, h = struct.unpack("<HH", header[4:8])
        return np.frombuffer(f.read(), dtype="<f4").reshape(h, w)
