"""tellosim: a headless Tello-style micro-drone simulation pipeline.

Subsystems: world model and scenario generation (scene, scenario),
command executors and sensors (drone), raycast camera (camera), the
pose-space BFS planner (planner), dataset generation and the TDS1 format
(datagen, dataset), classification/flight metrics (metrics), and the
closed-loop flight harness with pluggable policies (harness, policies).
"""

from .camera import CameraIntrinsics, CameraMount, Image, dfov_to_vfov, render
from .datagen import CameraSettings, EnvParams, generate_dataset, generate_dataset_naive
from .dataset import Dataset, Sample, label_histogram, read_dataset, split_dataset, write_dataset
from .drone import (
    CommandResult,
    CommandStatus,
    DroneState,
    FlightCommand,
    MotionProfileConfig,
    execute_simple,
    execute_velocity,
    path_clear,
    read_sensors,
)
from .geometry import Pose, Vec3, rotate_body_to_world
from .harness import EvaluationReport, FlightRecord, Outcome, classify_outcome, evaluate, run_flight
from .metrics import confusion_and_macro_f1, label_weights, ols_fit
from .planner import PlanResult, PlannerConfig, iteration_bound, naive_bfs, optimal_flight_path, pose_key
from .policies import ExternalPolicy, OraclePolicy, Policy, ScriptedPolicy
from .rng import Rng
from .scenario import generate_scenario, scenario_is_solvable
from .scene import Cuboid, LandingPlatform, RoomDims, Scene, load_scene, ray_intersect, save_scene

__version__ = "0.1.0"
