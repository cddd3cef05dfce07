#!/usr/bin/env python3
"""P(kappa(M + N) >= n^B) for a worst-case M under sign noise.

Sweeps B over a grid and reports, per size, the exceedance fraction with
a Wilson interval, plus the smallest B whose fraction stays at or below
the target. --compare-gaussian runs the same base matrix under gaussian
noise and flags rows whose intervals overlap.
"""

import argparse
import sys

from perturblab import ExperimentConfig, condition_tail
from perturblab.records import format_summary_json, write_records_csv, write_summary_json


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20260818)
    ap.add_argument("--matrix", default="graded_diagonal")
    ap.add_argument("--noise", default="bernoulli")
    ap.add_argument("--b-grid", dest="b_grid", type=float, nargs="+",
                    default=[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    ap.add_argument("--target", type=float, default=0.01)
    ap.add_argument("--compare-gaussian", action="store_true")
    ap.add_argument("--threads", type=int, default=8)
    ap.add_argument("--out", help="output stem")
    args = ap.parse_args(argv)

    cfg = ExperimentConfig(
        kind="cond-tail",
        sizes=tuple(args.sizes),
        trials=args.trials,
        seed=args.seed,
        noise=args.noise,
        matrix=args.matrix,
        b_grid=tuple(args.b_grid),
        target_exceedance=args.target,
        compare_gaussian=args.compare_gaussian,
        threads=args.threads,
        out=args.out,
    )
    result = condition_tail(cfg)
    for n, rows in sorted(result.tables.items()):
        for row in rows:
            extra = ""
            if row.comparable_to_gaussian is not None:
                extra = "  ~gaussian" if row.comparable_to_gaussian else "  !=gaussian"
            print(f"n={n:4d}  B={row.b:4.1f}  P(kappa >= n^B) = {row.fraction:.4f} "
                  f"[{row.ci_low:.4f}, {row.ci_high:.4f}]{extra}")
        b = result.smallest_sufficient_b.get(n)
        print(f"n={n:4d}  smallest B with exceedance <= {args.target}: {b}")
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
