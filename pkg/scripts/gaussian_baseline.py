#!/usr/bin/env python3
"""Tail of ||(M + N)^-1|| under gaussian noise.

For each size n the script draws `trials` perturbed matrices, estimates
P(||(M+N)^-1|| >= x) on a geometric grid of x, and fits the log-log
slope. Theory predicts a slope near -1, with the curve pushed through
x ~ sqrt(n). Writes <out>.csv (per-trial records) and <out>.json
(curves and slopes) when --out is given, else prints the summary.
"""

import argparse
import json
import sys

from perturblab import ExperimentConfig, tail_curve
from perturblab.records import format_summary_json, write_records_csv, write_summary_json


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 50])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=20260818)
    ap.add_argument("--matrix", default="zero")
    ap.add_argument("--threads", type=int, default=8)
    ap.add_argument("--out", help="output stem")
    args = ap.parse_args(argv)

    cfg = ExperimentConfig(
        kind="tail",
        sizes=tuple(args.sizes),
        trials=args.trials,
        seed=args.seed,
        noise="gaussian",
        matrix=args.matrix,
        threads=args.threads,
        out=args.out,
    )
    result = tail_curve(cfg)
    for n, curve in sorted(result.curves.items()):
        slope = "n/a" if curve.slope is None else f"{curve.slope:+.3f}"
        print(f"n={n:4d}  trials={args.trials}  fitted log-log slope {slope} "
              f"({curve.slope_points} grid points)")
    summary = result.summary()
    if args.out:
        write_records_csv(args.out + ".csv", result.records)
        write_summary_json(args.out + ".json", summary)
        print(f"wrote {args.out}.csv and {args.out}.json")
    else:
        print(format_summary_json(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
