#!/usr/bin/env python3
"""Reproduce the label-distribution comparison between the two data
collection procedures in a non-obstructed room.

The naive procedure drops the drone at random poses and keeps one sample
each; rotations dominate its labels. The sophisticated procedure records
every step of planned flights, which spreads mass onto forward/land and
gives each flight exactly one takeoff.

Usage: python scripts/reproduce_histograms.py [--samples N] [--seed S] [--workers W]
"""

import argparse

from tellosim.datagen import CameraSettings, EnvParams, generate_dataset, generate_dataset_naive
from tellosim.dataset import label_histogram, label_shares
from tellosim.drone import COMMAND_NAMES


def show(title, dataset):
    counts, flights = label_histogram(dataset)
    shares = label_shares(counts)
    print(f"\n{title} ({len(dataset)} samples, {flights} flights)")
    for name, count, share in zip(COMMAND_NAMES, counts, shares):
        bar = "#" * round(share * 60)
        print(f"  {name:8s} {count:5d}  {share * 100:5.1f}%  {bar}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=4)
    args = parser.parse_args()

    camera = CameraSettings("fisheye", 160, 120)
    naive = generate_dataset_naive(args.samples, args.seed, camera,
                                   workers=args.workers)
    show("naive collection", naive)
    soph = generate_dataset(args.samples, args.seed,
                            EnvParams(max_obstacles=0), camera,
                            workers=args.workers)
    show("sophisticated collection", soph)


if __name__ == "__main__":
    main()
