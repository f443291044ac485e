#!/usr/bin/env python3
"""Report the planner's worst-case iteration bound against measured
visited-state counts on random obstructed scenes.

The bound is ceil(w/c) * ceil(d/c) * ceil(h/c) * (360/y). With the
default room and search parameters it evaluates to 373,248. The commonly
quoted worst-case figure of 135,252 instead matches the formula with a
0.20 m cube edge (ceil(3.3/0.2)^2 * ceil(2.5/0.2) * 36), i.e. without
the 1/sqrt(2) factor on the cube edge; this script prints both.
"""

import argparse

from tellosim.drone import DroneState
from tellosim.planner import PlannerConfig, iteration_bound, optimal_flight_path
from tellosim.rng import Rng
from tellosim.scenario import generate_scenario
from tellosim.scene import RoomDims


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenes", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7100)
    args = parser.parse_args()

    cfg = PlannerConfig()
    room = RoomDims()
    bound = iteration_bound(room, cfg)
    alt = PlannerConfig(cube_edge=0.20)
    print(f"bound with cube edge {cfg.cube_edge:.6f} m: {bound}")
    print(f"bound with cube edge 0.20 m:      {iteration_bound(room, alt)}")

    worst = 0
    for i in range(args.scenes):
        scene = generate_scenario(Rng(args.seed).derive(i), 10, 2.0)
        result = optimal_flight_path(scene, DroneState.at_start(scene), cfg)
        worst = max(worst, result.visited)
        status = f"len={len(result.path)}" if result.found else "unsolvable"
        print(f"scene {i:3d}: visited={result.visited:6d}  "
              f"iterations={result.iterations:6d}  {status}")
    print(f"\nmax visited over {args.scenes} scenes: {worst} "
          f"({worst / bound * 100:.1f}% of bound)")


if __name__ == "__main__":
    main()
