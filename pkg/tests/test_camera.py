import math

import numpy as np
import pytest

from tellosim.camera import (
    CameraIntrinsics,
    CameraMount,
    dfov_to_vfov,
    primary_ray,
    project_point,
    read_depth,
    read_pgm,
    render,
    view_basis,
    write_depth,
    write_pgm,
)
from tellosim.geometry import Pose, Vec3, rotate_body_to_world
from tellosim.scene import Cuboid, LandingPlatform, RoomDims, Scene, ray_intersect


def empty_scene():
    return Scene(room=RoomDims(), platform=LandingPlatform.on_floor(1.65, 1.65),
                 cuboids=(), drone_start=Pose(Vec3(0.6, 0.6, 0.0), 0.0))


def fisheye():
    mount = CameraMount("fisheye")
    return CameraIntrinsics(160, 120, mount.dfov), mount


class TestDfovToVfov:
    def test_tello_dfov(self):
        vfov = math.degrees(dfov_to_vfov(math.radians(82.6), 4, 3))
        assert vfov == pytest.approx(55.5886, abs=5e-3)

    def test_fisheye_dfov(self):
        vfov = math.degrees(dfov_to_vfov(math.radians(150.0), 4, 3))
        assert vfov == pytest.approx(131.87, abs=5e-2)

    def test_small_angle_limit(self):
        dfov = 0.001
        assert dfov_to_vfov(dfov, 4, 3) == pytest.approx(dfov * 0.6, abs=1e-9)

    def test_strictly_increasing(self):
        values = [dfov_to_vfov(math.radians(d), 160, 120) for d in range(5, 176, 5)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_domain_check(self):
        with pytest.raises(ValueError):
            dfov_to_vfov(math.pi, 4, 3)


class TestViewBasis:
    def test_identity_mount(self):
        mount = CameraMount("front")
        eye, forward, up = view_basis(Pose(Vec3(1, 1, 1), 0.0), mount, pitch_down=0.0)
        assert forward == pytest.approx((1, 0, 0))
        assert up == pytest.approx((0, 0, 1))
        assert eye == pytest.approx((1.04, 1, 1))  # 4 cm forward offset

    def test_bottom_mount(self):
        mount = CameraMount("bottom")
        _, forward, up = view_basis(Pose(Vec3(0, 0, 1), 0.0), mount)
        assert forward == pytest.approx((0, 0, -1), abs=1e-12)
        assert up == pytest.approx((1, 0, 0), abs=1e-12)

    def test_yawed_pitched_by_hand(self):
        mount = CameraMount("front")  # 10 deg down
        _, forward, _ = view_basis(Pose(Vec3(0, 0, 1), math.pi / 2), mount)
        expected = (0.0, math.cos(math.radians(10)), -math.sin(math.radians(10)))
        assert forward == pytest.approx(expected, abs=1e-12)

    def test_orthonormal(self):
        mount = CameraMount("diagonal")
        _, forward, up = view_basis(Pose(Vec3(1, 2, 1), 1.1), mount)
        assert forward.norm() == pytest.approx(1.0)
        assert up.norm() == pytest.approx(1.0)
        assert forward.dot(up) == pytest.approx(0.0, abs=1e-12)


class TestPrimaryRay:
    def test_center_pixel_is_optical_axis(self):
        intr, mount = fisheye()
        eye, forward, up = view_basis(Pose(Vec3(1, 1, 1), 0.3), mount)
        # 160x120 has no exact center pixel; average the four middle ones
        dirs = [primary_ray(intr, eye, forward, up, px, py)[1]
                for px in (79, 80) for py in (59, 60)]
        mean = Vec3(sum(d.x for d in dirs) / 4, sum(d.y for d in dirs) / 4,
                    sum(d.z for d in dirs) / 4).normalized()
        assert mean.dot(forward) == pytest.approx(1.0, abs=1e-6)

    def test_top_center_angle_is_half_vfov(self):
        intr, mount = fisheye()
        eye, forward, up = view_basis(Pose(Vec3(1, 1, 1), 0.0), mount)
        half_pixel = intr.vfov / intr.height
        angles = []
        for px in (79, 80):
            _, d = primary_ray(intr, eye, forward, up, px, 0)
            angles.append(math.acos(max(-1.0, min(1.0, d.dot(forward)))))
        assert np.mean(angles) == pytest.approx(intr.vfov / 2, abs=half_pixel)

    def test_edge_rays_symmetric(self):
        intr, mount = fisheye()
        eye, forward, up = view_basis(Pose(Vec3(1, 1, 1), 0.0), mount)
        _, left = primary_ray(intr, eye, forward, up, 0, 60)
        _, right = primary_ray(intr, eye, forward, up, intr.width - 1, 60)
        assert left.dot(forward) == pytest.approx(right.dot(forward), abs=1e-12)

    def test_out_of_range_pixel(self):
        intr, mount = fisheye()
        eye, forward, up = view_basis(Pose(Vec3(1, 1, 1), 0.0), mount)
        with pytest.raises(ValueError):
            primary_ray(intr, eye, forward, up, intr.width, 0)


class TestRender:
    def test_deterministic(self):
        intr, mount = fisheye()
        scene = empty_scene()
        pose = Pose(Vec3(1.2, 1.4, 0.525), 0.7)
        a = render(scene, intr, mount, pose)
        b = render(scene, intr, mount, pose)
        assert a.pixels == b.pixels
        assert np.array_equal(a.depth, b.depth)

    def test_wall_fills_frame_uniformly(self):
        # nose against the x=w wall: every ray hits the same flat surface
        scene = empty_scene()
        intr = CameraIntrinsics(160, 120, CameraMount("front").dfov)
        mount = CameraMount("front")
        img = render(scene, intr, mount, Pose(Vec3(3.0, 1.65, 1.25), 0.0))
        arr = img.as_array().astype(int)
        assert arr.max() - arr.min() <= 2  # flat shading, quantization only

    def test_depth_matches_scalar_raycast(self):
        intr, mount = fisheye()
        scene = Scene(platform=LandingPlatform.on_floor(1.65, 1.65),
                      cuboids=(Cuboid(Vec3(2.2, 1.2, 0.4), 0.5, Vec3(0.3, 0.2, 0.4)),),
                      drone_start=Pose(Vec3(0.6, 0.6, 0.0), 0.0))
        pose = Pose(Vec3(0.8, 0.9, 0.525), 0.4)
        img = render(scene, intr, mount, pose)
        eye, forward, up = view_basis(pose, mount)
        for px, py in ((5, 5), (80, 60), (150, 110), (40, 90), (120, 20)):
            origin, direction = primary_ray(intr, eye, forward, up, px, py)
            hit = ray_intersect(scene, origin, direction)
            d = img.depth[py, px]
            if hit is not None and intr.near <= hit.distance <= intr.far:
                assert d == pytest.approx(hit.distance, abs=1e-5)
            else:
                assert d == pytest.approx(intr.far)

    def test_marker_visible_from_above(self):
        scene = empty_scene()
        intr = CameraIntrinsics(160, 120, CameraMount("bottom").dfov)
        mount = CameraMount("bottom")
        above = Pose(Vec3(1.65 - mount.offset.x, 1.65, 0.5), 0.0)  # camera over center
        over_platform = render(scene, intr, mount, above)
        over_floor = render(scene, intr, mount, Pose(Vec3(0.7, 0.7, 0.5), 0.0))
        var_marker = over_platform.as_array().astype(float).var()
        var_floor = over_floor.as_array().astype(float).var()
        assert var_marker > 10 * max(var_floor, 1e-9)

    def test_platform_projects_where_expected(self):
        scene = empty_scene()
        intr, mount = fisheye()
        pose = Pose(Vec3(0.6, 1.65, 0.525), 0.0)  # facing the platform center
        eye, forward, up = view_basis(pose, mount)
        target = Vec3(scene.platform.center.x, scene.platform.center.y,
                      scene.platform.top_z)
        px, py = project_point(intr, eye, forward, up, target)
        # the ray through the projected pixel must hit the platform and the
        # hit point must re-project within one pixel of that coordinate
        origin, direction = primary_ray(intr, eye, forward, up,
                                        round(px), round(py))
        hit = ray_intersect(scene, origin, direction)
        assert hit.surface == ("platform",)
        hit_point = origin.add(direction.scale(hit.distance))
        rx, ry = project_point(intr, eye, forward, up, hit_point)
        assert math.hypot(rx - px, ry - py) <= 1.0

    def test_yaw_equivariance(self):
        # rotating the drone by 10 deg equals counter-rotating the whole
        # world (geometry and light) about the camera eye
        step = math.radians(10.0)
        mount = CameraMount("front")
        intr = CameraIntrinsics(160, 120, mount.dfov)
        big_room = RoomDims(12.0, 12.0, 2.5)
        drone_at = Vec3(6.0, 6.0, 0.525)

        # eye of the yawed drone; the counter-rotated render places its
        # drone so that both renders share this exact eye point
        eye_yawed = drone_at.add(rotate_body_to_world(mount.offset, step))
        pose_b = Pose(eye_yawed.sub(mount.offset), 0.0)

        def rot_about_eye(p: Vec3) -> Vec3:
            rel = Vec3(p.x - eye_yawed.x, p.y - eye_yawed.y, p.z)
            out = rotate_body_to_world(rel, -step)
            return Vec3(out.x + eye_yawed.x, out.y + eye_yawed.y, out.z)

        cub = Cuboid(Vec3(6.75, 6.25, 0.5), 0.3, Vec3(0.2, 0.2, 0.5))
        plat = LandingPlatform.on_floor(6.65, 5.55, 0.2)
        # the room shell for world A, modeled as cuboids so it can rotate
        wall_specs = ((6.0, 4.30, 1.75, 0.05), (6.0, 7.70, 1.75, 0.05),
                      (4.30, 6.0, 0.05, 1.75), (7.70, 6.0, 0.05, 1.75))

        def build(rotated: bool) -> Scene:
            walls = []
            for cx, cy, ex, ey in wall_specs:
                c = Vec3(cx, cy, 1.25)
                yaw = 0.0
                if rotated:
                    c = rot_about_eye(c)
                    yaw = -step
                walls.append(Cuboid(c, yaw, Vec3(ex, ey, 1.25), 0.85))
            pc, cc = plat.center, cub.center
            pyaw, cyaw = plat.yaw, cub.yaw
            if rotated:
                pc, cc = rot_about_eye(pc), rot_about_eye(cc)
                pyaw, cyaw = plat.yaw - step, cub.yaw - step
            return Scene(
                room=big_room,
                platform=LandingPlatform(Vec3(pc.x, pc.y, plat.center.z), pyaw),
                cuboids=(Cuboid(cc, cyaw, cub.half_extents, cub.albedo),) + tuple(walls),
                drone_start=Pose(Vec3(0.6, 0.6, 0.0), 0.0),
            )

        light = Vec3(0.3, 0.2, 1.0).normalized()
        img_a = render(build(False), intr, mount, Pose(drone_at, step),
                       light_dir=light)
        img_b = render(build(True), intr, mount, pose_b,
                       light_dir=rotate_body_to_world(light, -step))
        a = img_a.as_array().astype(int)
        b = img_b.as_array().astype(int)
        close = np.abs(a - b) <= 2
        assert close.mean() >= 0.99  # pixel-center sampling differs at edges

    def test_split_mode_stacks_views(self):
        scene = empty_scene()
        mount = CameraMount("split")
        intr = CameraIntrinsics(160, 120, mount.dfov)
        pose = Pose(Vec3(1.65, 1.65, 0.525), 0.0)
        split = render(scene, intr, mount, pose)
        assert split.width == 160 and split.height == 120
        # top half looks straight down (floor distances ~0.5), bottom half forward
        top = split.depth[:60, :]
        bottom = split.depth[60:, :]
        assert abs(float(np.median(top)) - 0.5) < 0.1
        assert float(np.median(bottom)) > 1.0


class TestImageFormats:
    def test_pgm_round_trip(self, tmp_path):
        intr, mount = fisheye()
        img = render(empty_scene(), intr, mount, Pose(Vec3(1, 1, 0.5), 0.4))
        path = tmp_path / "frame.pgm"
        write_pgm(img, str(path))
        back = read_pgm(str(path))
        assert (back.width, back.height) == (img.width, img.height)
        assert back.pixels == img.pixels
        with open(path, "rb") as f:
            assert f.read(2) == b"P5"

    def test_depth_round_trip(self, tmp_path):
        intr, mount = fisheye()
        img = render(empty_scene(), intr, mount, Pose(Vec3(1, 1, 0.5), 0.4))
        path = tmp_path / "frame.dpt"
        write_depth(img, str(path))
        back = read_depth(str(path))
        assert np.array_equal(back, img.depth)
        with open(path, "rb") as f:
            header = f.read(16)
        assert header[:4] == b"DPT1"
        assert len(header) == 16


class TestIntrinsicsValidation:
    def test_aspect_must_be_4_3(self):
        with pytest.raises(ValueError):
            CameraIntrinsics(160, 100, math.radians(82.6))

    def test_near_far_ordering(self):
        with pytest.raises(ValueError):
            CameraIntrinsics(160, 120, math.radians(82.6), near=5.0, far=1.0)

    def test_mount_modes(self):
        assert CameraMount("fisheye").dfov == pytest.approx(math.radians(150.0))
        assert CameraMount("front").dfov == pytest.approx(math.radians(82.6))
        assert CameraMount("diagonal").pitch_down == pytest.approx(math.radians(45.0))
        with pytest.raises(ValueError):
            CameraMount("sideways")
