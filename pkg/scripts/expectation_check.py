#!/usr/bin/env python3
"""Compare mean pre-removal set size against the volume prediction.

For a fixed scheduled single-shell configuration, the expected number of
elements landing in the annuli is N * (box fraction) * (relative shell
volume).  This script redraws the torus direction/shift over many seeds and
reports the sample mean against that prediction with its combined standard
error.

Example:
    python3 scripts/expectation_check.py --n 10000 --seeds 50
"""

import argparse
import dataclasses
import math
import sys

import numpy as np

from progfree import build_torus_set, mc_annuli_volume, single_shell_config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10 ** 4, help="universe size")
    parser.add_argument("--k", type=int, default=3, help="progression length")
    parser.add_argument("--deg", type=int, default=1, help="max degree")
    parser.add_argument("--seeds", type=int, default=50,
                        help="number of direction/shift redraws")
    parser.add_argument("--schedule-seed", type=int, default=0,
                        help="seed fixing the scheduled shell offset")
    parser.add_argument("--mc-samples", type=int, default=10 ** 6,
                        help="Monte Carlo samples for the shell volume")
    args = parser.parse_args(argv)

    config = single_shell_config(args.n, args.k, args.deg, args.schedule_seed)
    mc = mc_annuli_volume(config.annuli, args.mc_samples, seed=123)
    box_fraction = 2.0 ** -(config.dim * config.degree)
    target = args.n * mc.relative_volume * box_fraction

    sizes = []
    removed = []
    for seed in range(args.seeds):
        built = build_torus_set(dataclasses.replace(config, seed=seed))
        sizes.append(built.pre_removal_size)
        removed.append(built.pre_removal_size - len(built.result))
    mean = float(np.mean(sizes))
    se_mean = float(np.std(sizes, ddof=1)) / math.sqrt(len(sizes))
    se_target = args.n * box_fraction * mc.std_error
    combined = math.hypot(se_mean, se_target)
    deviation = (mean - target) / combined if combined else float("nan")

    print(f"config: n={args.n} k={args.k} degree={args.deg} "
          f"dim={config.dim} delta={config.annuli.delta:.6g} z={config.annuli.z}")
    print(f"shell volume (relative to box): {mc.relative_volume:.6g} "
          f"+- {mc.std_error:.2g} ({mc.samples} samples)")
    print(f"predicted pre-removal size: {target:.4f}")
    print(f"observed mean over {args.seeds} seeds: {mean:.4f} +- {se_mean:.4f}")
    print(f"mean removals per draw: {float(np.mean(removed)):.4f}")
    print(f"deviation: {deviation:+.2f} combined standard errors")
    return 0 if abs(deviation) <= 3 else 1


if __name__ == "__main__":
    sys.exit(main())
