"""Labeled-dataset generation.

Two collection procedures exist. The sophisticated one spawns the drone
and the platform on the floor of a fresh random scenario (re-generated
until the planner can solve it), computes the optimal flight path, and
then walks it: before each command it records an image, sensor readings
and the previous commands, labels the record with the command about to be
executed, and executes it. The naive one instead drops the drone at a
uniformly random pose anywhere in the room volume and records a single
sample labeled with the first command of the optimal path from there; it
yields a rotation-dominated label distribution and exists mainly as the
baseline.

Flights are independent work units keyed by (master seed, flight index),
so parallel generation is byte-identical to sequential generation.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .camera import CameraIntrinsics, CameraMount, render
from .dataset import NO_COMMAND, Dataset, Sample
from .drone import DroneState, DRONE_HALF_EXTENTS, FlightCommand, execute_simple, read_sensors
from .geometry import Pose, Vec3, obb_footprints_overlap
from .planner import PlannerConfig, optimal_flight_path
from .rng import Rng
from .scene import LandingPlatform, RoomDims, Scene
from .scenario import (
    DEFAULT_MAX_ATTEMPTS,
    PlacementExhaustedError,
    _footprint_xy_in_room,
    solvable_scenario,
)

DEFAULT_PREV_K = 2


@dataclass(frozen=True)
class EnvParams:
    max_obstacles: int = 10
    max_edge: float = 2.0
    room: RoomDims = field(default_factory=RoomDims)


@dataclass(frozen=True)
class CameraSettings:
    mode: str = "fisheye"  # the winning set-up
    width: int = 160
    height: int = 120

    def intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics(self.width, self.height, CameraMount(self.mode).dfov)

    def mount(self) -> CameraMount:
        return CameraMount(self.mode)


def _prev_window(executed: List[int], k: int) -> Tuple[int, ...]:
    window = executed[-k:][::-1] if k > 0 else []
    return tuple(window) + (NO_COMMAND,) * (k - len(window))


def _capture(scene: Scene, state: DroneState, camera: CameraSettings,
             executed: List[int], prev_k: int, flight_id: int, label: int) -> Sample:
    image = render(scene, camera.intrinsics(), camera.mount(), state.pose)
    sensors = read_sensors(state)
    return Sample(
        flight_id=flight_id,
        label=label,
        height_m=sensors.height_m,
        tof_m=sensors.tof_m,
        cmd_count=float(sensors.cmd_count),
        prev_cmds=_prev_window(executed, prev_k),
        pixels=image.pixels,
    )


def sophisticated_flight(master_seed: int, flight_index: int, env: EnvParams,
                         camera: CameraSettings, prev_k: int,
                         planner_cfg: Optional[PlannerConfig] = None) -> List[Sample]:
    """All samples of one planned flight in a fresh solvable scenario."""
    rng = Rng(master_seed).derive(flight_index)
    cfg = planner_cfg if planner_cfg is not None else PlannerConfig()
    scene, plan = solvable_scenario(rng, env.max_obstacles, env.max_edge, env.room, cfg)
    state = DroneState.at_start(scene)
    executed: List[int] = []
    samples: List[Sample] = []
    for cmd in plan.path:
        samples.append(_capture(scene, state, camera, executed, prev_k,
                                flight_index, int(cmd)))
        result = execute_simple(state, scene, cmd)
        if result.status.value != "moved":
            raise RuntimeError(
                f"planned command {cmd.name} failed replay ({result.status.value})")
        executed.append(int(cmd))
    return samples


def _lookahead_length(scene: Scene, state: DroneState, cmd,
                      cfg: PlannerConfig) -> Optional[int]:
    probe = state.copy()
    if execute_simple(probe, scene, cmd).status.value != "moved":
        return None
    follow_up = optimal_flight_path(scene, probe, cfg)
    return 1 + len(follow_up.path) if follow_up.found else None


def first_optimal_command(scene: Scene, state: DroneState,
                          cfg: PlannerConfig) -> Optional[int]:
    """Label for a one-shot placement: the command that starts a
    minimum-length flight path.

    The searcher breaks ties between equally short paths in its fixed
    expansion order, which puts forward ahead of the rotations; for
    labeling, a rotation that is just as good as flying forward is the
    better teaching signal (it is what dominates real flights), so
    forward-first plans are re-checked with a one-step lookahead and a
    rotation wins any tie.
    """
    plan = optimal_flight_path(scene, state.copy(), cfg)
    if not plan.found or not plan.path:
        return None
    first = plan.path[0]
    if first != FlightCommand.FORWARD:
        return int(first)
    lengths = {cmd: _lookahead_length(scene, state, cmd, cfg)
               for cmd in (FlightCommand.FORWARD, FlightCommand.CW, FlightCommand.CCW)}
    best = min(v for v in lengths.values() if v is not None)
    for cmd in (FlightCommand.CW, FlightCommand.CCW, FlightCommand.FORWARD):
        if lengths[cmd] == best:
            return int(cmd)
    return int(first)


def naive_sample(master_seed: int, index: int, camera: CameraSettings, prev_k: int,
                 room: RoomDims = RoomDims(),
                 planner_cfg: Optional[PlannerConfig] = None) -> Sample:
    """One sample from a uniformly random spawn anywhere in the room.

    The platform goes on the floor, the drone anywhere in the volume
    (a draw in the bottom half-height band rests it on the floor). The
    takeoff reference of an airborne spawn is its floor projection so the
    sensor readings stay well defined. Spawns whose optimal path is empty
    or unsolvable are re-drawn.
    """
    rng = Rng(master_seed).derive(index)
    cfg = planner_cfg if planner_cfg is not None else PlannerConfig()
    hz = DRONE_HALF_EXTENTS.z
    for _ in range(DEFAULT_MAX_ATTEMPTS):
        pcx = rng.uniform(0.0, room.w)
        pcy = rng.uniform(0.0, room.d)
        pyaw = rng.angle()
        if not _footprint_xy_in_room(pcx, pcy, pyaw, 0.30, 0.30, room):
            continue
        x = rng.uniform(0.0, room.w)
        y = rng.uniform(0.0, room.d)
        z = rng.uniform(0.0, room.h - hz)
        yaw = rng.angle()
        if not _footprint_xy_in_room(x, y, yaw, DRONE_HALF_EXTENTS.x, DRONE_HALF_EXTENTS.y, room):
            continue
        grounded = z <= hz
        pose = Pose(Vec3(x, y, max(z, hz)), yaw)
        platform = LandingPlatform.on_floor(pcx, pcy, pyaw)
        if pose.position.z - hz < platform.top_z and obb_footprints_overlap(
                x, y, yaw, DRONE_HALF_EXTENTS.x, DRONE_HALF_EXTENTS.y,
                pcx, pcy, pyaw, platform.side / 2.0, platform.side / 2.0):
            continue  # spawn box would clip the platform slab
        scene = Scene(room=room, platform=platform,
                      cuboids=(), drone_start=Pose(Vec3(x, y, 0.0), yaw))
        state = DroneState(pose=pose, airborne=not grounded,
                           takeoff_pose=Pose(Vec3(x, y, hz), yaw))
        label = first_optimal_command(scene, state, cfg)
        if label is None:
            continue
        return _capture(scene, state, camera, [], prev_k, index, label)
    raise PlacementExhaustedError("no usable naive spawn found")


def _sophisticated_task(args) -> List[Sample]:
    return sophisticated_flight(*args)


def _naive_task(args) -> Sample:
    return naive_sample(*args)


def generate_dataset(size: int, seed: int, env: EnvParams = EnvParams(),
                     camera: CameraSettings = CameraSettings(),
                     prev_k: int = DEFAULT_PREV_K,
                     planner_cfg: Optional[PlannerConfig] = None,
                     workers: int = 1) -> Dataset:
    """Sophisticated collection of exactly `size` samples (the last
    flight may be truncated mid-path)."""
    if size <= 0:
        raise ValueError("size must be positive")
    samples: List[Sample] = []
    flight_index = 0
    if workers <= 1:
        while len(samples) < size:
            samples.extend(sophisticated_flight(seed, flight_index, env, camera,
                                                prev_k, planner_cfg))
            flight_index += 1
    else:
        chunk = max(workers * 2, 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            while len(samples) < size:
                args = [(seed, flight_index + i, env, camera, prev_k, planner_cfg)
                        for i in range(chunk)]
                for flight_samples in pool.map(_sophisticated_task, args):
                    samples.extend(flight_samples)
                flight_index += chunk
    return Dataset(camera.width, camera.height, prev_k, samples[:size])


def generate_dataset_naive(size: int, seed: int,
                           camera: CameraSettings = CameraSettings(),
                           prev_k: int = DEFAULT_PREV_K,
                           room: RoomDims = RoomDims(),
                           planner_cfg: Optional[PlannerConfig] = None,
                           workers: int = 1) -> Dataset:
    """Naive collection: one sample per random placement, empty room."""
    if size <= 0:
        raise ValueError("size must be positive")
    if workers <= 1:
        samples = [naive_sample(seed, i, camera, prev_k, room, planner_cfg)
                   for i in range(size)]
    else:
        args = [(seed, i, camera, prev_k, room, planner_cfg) for i in range(size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_naive_task, args, chunksize=8))
    return Dataset(camera.width, camera.height, prev_k, samples)
