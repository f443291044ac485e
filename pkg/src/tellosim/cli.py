"""Command-line entry point.

Subcommands: gen-data, plan, fly, evaluate, render, stats. Angles on the
command line are degrees (converted to radians internally); lengths are
meters. Exit status: 0 success, 1 usage error, 2 runtime failure.

A JSON config file may provide defaults for any flag (keyed by the flag's
dest name); explicit flags override it.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import List, Optional

from .camera import render, write_depth, write_pgm
from .datagen import (
    CameraSettings,
    EnvParams,
    generate_dataset,
    generate_dataset_naive,
)
from .dataset import label_histogram, label_shares, read_dataset, write_dataset, write_jsonl
from .drone import COMMAND_NAMES, DroneState, MotionProfileConfig
from .geometry import Pose, Vec3
from .harness import evaluate, run_flight
from .planner import PlannerConfig, iteration_bound, optimal_flight_path
from .policies import ExternalPolicy, OraclePolicy
from .scene import load_scene

CAMERA_CHOICES = ("fisheye", "front", "diagonal", "bottom", "split")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_size(text: str):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("size must look like 160x120") from exc


def _camera_settings(args) -> CameraSettings:
    w, h = args.size
    return CameraSettings(args.camera, w, h)


def _build_policy(spec: str, camera: CameraSettings, prev_k: int):
    if spec == "oracle":
        return OraclePolicy()
    if spec.startswith("external:"):
        return ExternalPolicy.from_spec(spec[len("external:"):],
                                        camera.width, camera.height, prev_k)
    raise SystemExit(f"unknown policy {spec!r} (use oracle or external:<spec>)")


def _policy_factory(spec: str, camera: CameraSettings, prev_k: int):
    def factory():
        return _build_policy(spec, camera, prev_k)
    return factory


def build_parser() -> _Parser:
    parser = _Parser(prog="tellosim", description=__doc__)
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", parents=[], help="generate a labeled dataset",
                       description="Generate a labeled flight dataset (TDS1).")
    g.add_argument("--samples", type=int, required=True, help="number of samples")
    g.add_argument("--seed", type=int, required=True, help="master seed")
    g.add_argument("--out", required=True, help="output TDS1 path")
    g.add_argument("--mode", choices=("sophisticated", "naive"), default="sophisticated")
    g.add_argument("--camera", choices=CAMERA_CHOICES, default="fisheye")
    g.add_argument("--size", type=_parse_size, default=(160, 120),
                   help="image size WxH in pixels (4:3), default 160x120")
    g.add_argument("--max-obstacles", type=int, default=10)
    g.add_argument("--max-edge", type=float, default=2.0,
                   help="largest obstacle edge (meters)")
    g.add_argument("--prev-k", type=int, default=2,
                   help="previous-command window stored per sample")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--jsonl", help="also export a JSONL sidecar to this path")

    p = sub.add_parser("plan", help="print the optimal flight path for a scene")
    p.add_argument("--scene", required=True, help="scene JSON path")
    p.add_argument("--start", help="override start as x,y,yaw (meters, meters, degrees)")

    f = sub.add_parser("fly", help="fly one scene under a policy")
    f.add_argument("--scene", required=True)
    f.add_argument("--policy", required=True, help="oracle | external:cmd:<argv> | external:tcp:host:port")
    f.add_argument("--max-commands", type=int, default=100)
    f.add_argument("--camera", choices=CAMERA_CHOICES, default="fisheye")
    f.add_argument("--size", type=_parse_size, default=(160, 120))
    f.add_argument("--prev-k", type=int, default=2)
    f.add_argument("--trace", help="write a velocity-profile trajectory trace (JSONL) here")

    e = sub.add_parser("evaluate", help="run seeded test flights and report outcome shares")
    e.add_argument("--flights", type=int, required=True)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--policy", required=True)
    e.add_argument("--report", help="write the JSON report here")
    e.add_argument("--camera", choices=CAMERA_CHOICES, default="fisheye")
    e.add_argument("--size", type=_parse_size, default=(160, 120))
    e.add_argument("--max-obstacles", type=int, default=10)
    e.add_argument("--max-edge", type=float, default=2.0,
                   help="largest obstacle edge (meters)")
    e.add_argument("--max-commands", type=int, default=100)
    e.add_argument("--prev-k", type=int, default=2)
    e.add_argument("--workers", type=int, default=1)

    r = sub.add_parser("render", help="render one camera frame of a scene")
    r.add_argument("--scene", required=True)
    r.add_argument("--pose", required=True,
                   help="drone pose x,y,z,yaw (meters, meters, meters, degrees)")
    r.add_argument("--camera", choices=CAMERA_CHOICES, default="fisheye")
    r.add_argument("--size", type=_parse_size, default=(160, 120))
    r.add_argument("--out", required=True, help="output PGM path")
    r.add_argument("--depth", help="also write the DPT1 depth raster here")

    s = sub.add_parser("stats", help="print the label histogram of a dataset")
    s.add_argument("--dataset", required=True, help="TDS1 path")
    return parser


def _cmd_gen_data(args) -> int:
    camera = _camera_settings(args)
    if args.mode == "sophisticated":
        env = EnvParams(args.max_obstacles, args.max_edge)
        ds = generate_dataset(args.samples, args.seed, env, camera,
                              prev_k=args.prev_k, workers=args.workers)
    else:
        ds = generate_dataset_naive(args.samples, args.seed, camera,
                                    prev_k=args.prev_k, workers=args.workers)
    write_dataset(ds, args.out)
    if args.jsonl:
        write_jsonl(ds, args.jsonl)
    counts, flights = label_histogram(ds)
    print(f"wrote {len(ds)} samples over {flights} flights to {args.out}")
    return 0


def _cmd_plan(args) -> int:
    scene = load_scene(args.scene)
    if args.start:
        x, y, yaw_deg = (float(v) for v in args.start.split(","))
        scene = dataclasses.replace(
            scene, drone_start=Pose(Vec3(x, y, 0.0), math.radians(yaw_deg) % (2 * math.pi)))
        scene.validate()
    cfg = PlannerConfig()
    result = optimal_flight_path(scene, DroneState.at_start(scene), cfg)
    for cmd in result.path:
        print(COMMAND_NAMES[cmd])
    bound = iteration_bound(scene.room, cfg)
    found = "true" if result.found else "false"
    print(f"found={found} len={len(result.path)} visited={result.visited} "
          f"iterations={result.iterations} bound={bound}")
    return 0


def _cmd_fly(args) -> int:
    scene = load_scene(args.scene)
    camera = _camera_settings(args)
    policy = _build_policy(args.policy, camera, args.prev_k)
    trace_file = None
    motion_cfg = None
    observer = None
    if args.trace:
        trace_file = open(args.trace, "w", encoding="utf-8")
        motion_cfg = MotionProfileConfig()

        def observer(t, pose, speed):
            trace_file.write(json.dumps({
                "t": t, "x": pose.position.x, "y": pose.position.y,
                "z": pose.position.z, "yaw": pose.yaw, "speed": speed,
            }) + "\n")

    try:
        record = run_flight(scene, policy, args.max_commands, camera,
                            prev_k=args.prev_k, motion_cfg=motion_cfg,
                            observer=observer)
    finally:
        if trace_file is not None:
            trace_file.close()
        policy.close()
    print(f"outcome={record.outcome.value} commands={record.commands_executed} "
          f"final_distance={record.final_distance:.3f}")
    return 0


def _cmd_evaluate(args) -> int:
    camera = _camera_settings(args)
    env = EnvParams(args.max_obstacles, args.max_edge)
    if args.workers > 1:
        policy = _policy_factory(args.policy, camera, args.prev_k)
    else:
        policy = _build_policy(args.policy, camera, args.prev_k)
    report = evaluate(policy, args.flights, args.seed, env, camera,
                      max_commands=args.max_commands, prev_k=args.prev_k,
                      workers=args.workers)
    if args.report:
        report.to_json(args.report)
    for outcome, share in sorted(report.shares.items()):
        print(f"{outcome} {share:.4f}")
    return 0


def _cmd_render(args) -> int:
    scene = load_scene(args.scene)
    x, y, z, yaw_deg = (float(v) for v in args.pose.split(","))
    pose = Pose(Vec3(x, y, z), math.radians(yaw_deg))
    camera = _camera_settings(args)
    image = render(scene, camera.intrinsics(), camera.mount(), pose)
    write_pgm(image, args.out)
    if args.depth:
        write_depth(image, args.depth)
    print(f"wrote {image.width}x{image.height} frame to {args.out}")
    return 0


def _cmd_stats(args) -> int:
    ds = read_dataset(args.dataset)
    counts, flights = label_histogram(ds)
    shares = label_shares(counts)
    for name, count, share in zip(COMMAND_NAMES, counts, shares):
        print(f"{name} {count} {share:.4f}")
    print(f"flights {flights}")
    return 0


_HANDLERS = {
    "gen-data": _cmd_gen_data,
    "plan": _cmd_plan,
    "fly": _cmd_fly,
    "evaluate": _cmd_evaluate,
    "render": _cmd_render,
    "stats": _cmd_stats,
}


def dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # pre-scan for --config so file values become defaults that flags override
    if "--config" in argv:
        idx = argv.index("--config")
        try:
            with open(argv[idx + 1], "r", encoding="utf-8") as f:
                defaults = json.load(f)
        except (OSError, IndexError, json.JSONDecodeError) as exc:
            print(f"tellosim: error: bad config file: {exc}", file=sys.stderr)
            return 1
        for action in parser._subparsers._group_actions[0].choices.values():  # type: ignore[union-attr]
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"tellosim: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
