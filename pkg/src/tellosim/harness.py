"""Closed-loop flight execution and batch evaluation.

A flight loops capture -> predict -> execute until the drone lands
somewhere, crashes, or a command budget (default 100) runs out. Invalid
commands are recorded and skipped without touching the drone, but still
count toward the budget. Outcomes: Crashed takes precedence; a landing
within 0.30 m horizontal of the platform center is LandedOnPlatform,
farther is LandedOutside; otherwise DidNotLand.

`evaluate` runs seeded flights in fresh solvable scenarios, aggregates
outcome shares and per-flight statistics, and fits the landed-flag
regression on (obstacle count, total obstacle volume, start distance).
"""

from __future__ import annotations

import hashlib
import json
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence

from .camera import Image, render
from .datagen import CameraSettings, EnvParams, DEFAULT_PREV_K
from .dataset import NO_COMMAND
from .drone import (
    CommandResult,
    CommandStatus,
    DroneState,
    FlightCommand,
    MotionProfileConfig,
    execute_simple,
    execute_velocity,
    read_sensors,
)
from .geometry import Pose, horizontal_distance
from .metrics import RankDeficientError, RegressionResult, ols_fit
from .planner import PlanResult, PlannerConfig
from .policies import Policy
from .rng import Rng
from .scenario import solvable_scenario
from .scene import LandingPlatform, Scene

DEFAULT_MAX_COMMANDS = 100
LANDED_RADIUS_M = 0.30


class Outcome(str, Enum):
    LANDED_ON_PLATFORM = "LandedOnPlatform"
    LANDED_OUTSIDE = "LandedOutside"
    CRASHED = "Crashed"
    DID_NOT_LAND = "DidNotLand"


@dataclass
class FlightStep:
    observation_digest: str
    command: FlightCommand
    result: CommandResult


@dataclass
class FlightRecord:
    scene: Scene
    steps: List[FlightStep]
    outcome: Outcome
    final_pose: Pose
    start_distance: float  # horizontal, start to platform center
    final_distance: float  # horizontal, final pose to platform center
    commands_executed: int  # loop steps consumed (invalid ones included)
    landed: bool

    @property
    def flight_path_length(self) -> int:
        """Commands that actually moved the drone."""
        return sum(1 for s in self.steps if s.result.status is CommandStatus.MOVED)


def _observation_digest(image: Image, sensors, prev_cmds: Sequence[int]) -> str:
    h = hashlib.sha256()
    h.update(image.pixels)
    h.update(struct.pack("<ffI", sensors.height_m, sensors.tof_m, sensors.cmd_count))
    h.update(bytes(prev_cmds))
    return h.hexdigest()[:16]


def classify_outcome(record: FlightRecord, platform: LandingPlatform) -> Outcome:
    """Recompute the outcome from a finished record (consistency check)."""
    if any(s.result.status is CommandStatus.CRASHED for s in record.steps):
        return Outcome.CRASHED
    if record.landed:
        dist = horizontal_distance(record.final_pose.position, platform.center)
        return (Outcome.LANDED_ON_PLATFORM if dist <= LANDED_RADIUS_M
                else Outcome.LANDED_OUTSIDE)
    return Outcome.DID_NOT_LAND


def run_flight(scene: Scene, policy: Policy,
               max_commands: int = DEFAULT_MAX_COMMANDS,
               camera: CameraSettings = CameraSettings(),
               prev_k: int = DEFAULT_PREV_K,
               flight_id: int = 0,
               plan: Optional[PlanResult] = None,
               motion_cfg: Optional[MotionProfileConfig] = None,
               observer=None) -> FlightRecord:
    """Fly one closed-loop flight. With a motion_cfg the velocity
    executor is used and `observer(t, pose, speed)` receives per-step
    samples with flight-cumulative time."""
    state = DroneState.at_start(scene)
    start_distance = horizontal_distance(state.pose.position, scene.platform.center)
    policy.begin_flight(scene, flight_id, plan)
    intrinsics = camera.intrinsics()
    mount = camera.mount()

    steps: List[FlightStep] = []
    executed: List[int] = []
    landed = False
    clock = 0.0

    for _ in range(max_commands):
        image = render(scene, intrinsics, mount, state.pose)
        sensors = read_sensors(state)
        window = executed[-prev_k:][::-1] if prev_k > 0 else []
        prev_cmds = tuple(window) + (NO_COMMAND,) * (prev_k - len(window))
        digest = _observation_digest(image, sensors, prev_cmds)
        cmd = policy.observe(image, sensors, prev_cmds)
        if not isinstance(cmd, FlightCommand):
            cmd = FlightCommand(cmd)

        if motion_cfg is not None:
            start_clock = clock

            def timed_observer(t, pose, speed):
                nonlocal clock
                clock = start_clock + t
                if observer is not None:
                    observer(start_clock + t, pose, speed)

            result = execute_velocity(state, scene, cmd, motion_cfg, timed_observer)
        else:
            result = execute_simple(state, scene, cmd)

        steps.append(FlightStep(digest, cmd, result))
        if result.status is CommandStatus.MOVED:
            executed.append(int(cmd))
            if cmd == FlightCommand.LAND:
                landed = True
                break
        elif result.status is CommandStatus.CRASHED:
            break

    final_distance = horizontal_distance(state.pose.position, scene.platform.center)
    record = FlightRecord(
        scene=scene,
        steps=steps,
        outcome=Outcome.DID_NOT_LAND,
        final_pose=state.pose,
        start_distance=start_distance,
        final_distance=final_distance,
        commands_executed=len(steps),
        landed=landed,
    )
    record.outcome = classify_outcome(record, scene.platform)
    policy.end_flight(record.outcome.value)
    return record


# ---------------------------------------------------------------------------
# Batch evaluation

@dataclass
class FlightRow:
    flight: int
    outcome: str
    start_distance: float
    final_distance: float
    nr_cuboids: int
    total_cuboid_volume: float
    path_len: int
    bfs_len: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class EvaluationReport:
    flights: int
    shares: dict
    rows: List[FlightRow]
    regression: Optional[RegressionResult]
    regression_note: str = ""

    def to_dict(self) -> dict:
        return {
            "flights": self.flights,
            "shares": self.shares,
            "per_flight": [r.to_dict() for r in self.rows],
            "regression": self.regression.to_dict() if self.regression else None,
            "regression_note": self.regression_note,
        }

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")


PolicyFactory = Callable[[], Policy]


def _evaluate_one(flight_index: int, seed: int, policy: Policy, env: EnvParams,
                  camera: CameraSettings, max_commands: int, prev_k: int,
                  planner_cfg: PlannerConfig) -> FlightRow:
    rng = Rng(seed).derive(flight_index)
    scene, plan = solvable_scenario(rng, env.max_obstacles, env.max_edge,
                                    env.room, planner_cfg)
    record = run_flight(scene, policy, max_commands, camera, prev_k,
                        flight_id=flight_index, plan=plan)
    return FlightRow(
        flight=flight_index,
        outcome=record.outcome.value,
        start_distance=record.start_distance,
        final_distance=record.final_distance,
        nr_cuboids=len(scene.cuboids),
        total_cuboid_volume=scene.total_cuboid_volume(),
        path_len=record.commands_executed,
        bfs_len=len(plan.path),
    )


_WORKER_STATE = {}


def _eval_worker_init(factory: PolicyFactory, seed: int, env: EnvParams,
                      camera: CameraSettings, max_commands: int, prev_k: int,
                      planner_cfg: PlannerConfig) -> None:
    _WORKER_STATE["policy"] = factory()
    _WORKER_STATE["args"] = (seed, env, camera, max_commands, prev_k, planner_cfg)


def _eval_worker_run(flight_index: int) -> FlightRow:
    seed, env, camera, max_commands, prev_k, planner_cfg = _WORKER_STATE["args"]
    return _evaluate_one(flight_index, seed, _WORKER_STATE["policy"], env,
                         camera, max_commands, prev_k, planner_cfg)


def evaluate(policy: "Policy | PolicyFactory", n_flights: int, seed: int,
             env: EnvParams = EnvParams(),
             camera: CameraSettings = CameraSettings(),
             max_commands: int = DEFAULT_MAX_COMMANDS,
             prev_k: int = DEFAULT_PREV_K,
             planner_cfg: Optional[PlannerConfig] = None,
             workers: int = 1) -> EvaluationReport:
    """Run seeded flights in freshly generated solvable scenarios."""
    if n_flights <= 0:
        raise ValueError("n_flights must be positive")
    cfg = planner_cfg if planner_cfg is not None else PlannerConfig()

    if workers <= 1:
        pol = policy() if callable(policy) and not isinstance(policy, Policy) else policy
        rows = [_evaluate_one(i, seed, pol, env, camera, max_commands, prev_k, cfg)
                for i in range(n_flights)]
    else:
        if isinstance(policy, Policy) or not callable(policy):
            raise ValueError("parallel evaluation needs a picklable policy factory")
        with ProcessPoolExecutor(
                max_workers=workers, initializer=_eval_worker_init,
                initargs=(policy, seed, env, camera, max_commands, prev_k, cfg)) as pool:
            rows = list(pool.map(_eval_worker_run, range(n_flights)))
    rows.sort(key=lambda r: r.flight)

    shares = {o.value: 0.0 for o in Outcome}
    for row in rows:
        shares[row.outcome] += 1.0
    for key in shares:
        shares[key] /= len(rows)

    regression = None
    note = ""
    design = [(r.nr_cuboids, r.total_cuboid_volume, r.start_distance) for r in rows]
    landed = [1.0 if r.outcome == Outcome.LANDED_ON_PLATFORM.value else 0.0 for r in rows]
    try:
        regression = ols_fit(design, landed)
    except RankDeficientError as exc:
        note = f"regression skipped: {exc}"
    return EvaluationReport(len(rows), shares, rows, regression, note)
