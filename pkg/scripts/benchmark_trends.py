#!/usr/bin/env python3
"""Noise, shuffle, timing and ensemble studies on one local dataset.

    python scripts/benchmark_trends.py page-blocks-binary [--seed 0] [--quick]

Prints the numbers the acceptance suite checks for Page blocks, for any
table known to ``gfmm.datasets`` (or a CSV path).  Useful for trying proxy
data; nothing here asserts.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gfmm.datasets import find_dataset
from gfmm.evaluation import ExperimentSpec, run_experiment, shuffle_std, summarize
from gfmm.io import load_csv


def table(records):
    for r in summarize(records):
        print(
            f"  {r.algorithm:15s} theta={r.theta:.1f} noise={r.noise:.2f} pruned={int(r.pruned)} "
            f"error={r.mean_error:6.2f}% std={r.std_error:5.2f} boxes={r.mean_boxes:8.2f} secs={r.mean_seconds:.3f}"
        )


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dataset")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="fewer thetas and shuffles")
    args = ap.parse_args(argv)
    path = find_dataset(args.dataset) or args.dataset
    ds = load_csv(path)
    X, y = ds.X, ds.y
    print(f"{path}: {X.shape[0]} rows, {X.shape[1]} features, {len(ds.class_names)} classes")
    thetas = (0.1, 0.4, 0.7) if args.quick else tuple(round(0.1 * i, 1) for i in range(1, 8))

    def run(title, **kw):
        t0 = time.perf_counter()
        recs = run_experiment(ExperimentSpec(seed=args.seed, **kw), X, y)
        print(f"{title} ({time.perf_counter() - t0:.1f} s)")
        return recs

    table(run("15% label noise, theta 0.7", thetas=(0.7,), algorithms=("iol", "onln"), noise=0.15, pruning=True))
    reps = 3 if args.quick else 11
    recs = run(f"{reps} shuffles, theta 0.7", thetas=(0.7,), algorithms=("iol", "onln+manhattan"), repetitions=reps)
    for key, s in shuffle_std(recs).items():
        print(f"  shuffle std {key}: {s:.2f}%")
    table(run("training time, theta 0.1", thetas=(0.1,), algorithms=("iol", "onln")))
    recs = run("ensemble vs single", thetas=thetas, algorithms=("iol", "iol-ensemble"))
    table(recs)
    rows = summarize(recs)
    for algo in ("iol", "iol-ensemble"):
        print(f"  mean error {algo}: {np.mean([r.mean_error for r in rows if r.algorithm == algo]):.2f}%")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
