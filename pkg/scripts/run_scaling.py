#!/usr/bin/env python3
"""Scaling experiment: relaxation counts and wall-clock across problem sizes.

Counts are deterministic functions of (n, delta); wall-clock is measured on
freshly generated random instances. A quadratic algorithm shows count ratios
of about 4 per doubling of n.

Usage:
    python3 scripts/run_scaling.py [--sizes 1000,2000,4000] [--delta 1]
                                   [--reps 3] [--seed 1] [--csv out.csv]
"""

import argparse
import json
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nearheight.bench import CSV_HEADER, report_to_csv_row, run_scaling


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,2000,4000")
    parser.add_argument("--delta", type=int, default=1)
    parser.add_argument("--reps", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--dist", choices=["uniform", "zipf"], default="uniform")
    parser.add_argument("--csv", help="also write rows to this CSV file")
    args = parser.parse_args()

    sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    reports = run_scaling(
        sizes, delta=args.delta, reps=args.reps, seed=args.seed, dist=args.dist
    )
    for report in reports:
        print(json.dumps(report.to_obj()))

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for report in reports:
                fh.write(report_to_csv_row(report) + "\n")

    by_n = {n: [r for r in reports if r.n == n] for n in sizes}
    print("\n  n      relaxations   median wall   count ratio", file=sys.stderr)
    prev = None
    for n in sizes:
        count = by_n[n][0].relaxation_count
        wall = statistics.median(r.wall_clock_s for r in by_n[n])
        ratio = f"{count / prev:.2f}" if prev else "-"
        print(f"  {n:<6} {count:>12}   {wall:>9.3f}s   {ratio:>11}", file=sys.stderr)
        prev = count
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
