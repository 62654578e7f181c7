#!/usr/bin/env python3
"""Sweep row-family subsets over a batch of synthetic instances.

Generates instances for several (window, order-count) cells, solves each
under the full row set, the bare model and each single-family removal, and
appends one benchmark row per solve to a CSV.

Usage: run_ablation.py [--outdir results] [--orders 4 5] [--windows 5 30]
"""

import argparse
import csv
import os
import subprocess
import sys


def sh(*args):
    print("+", " ".join(args), flush=True)
    subprocess.run(args, check=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--orders", type=int, nargs="+", default=[4, 5])
    ap.add_argument("--windows", type=int, nargs="+", default=[5, 30])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("ibc", "fbc"), default="ibc")
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument(
        "--small", action="store_true",
        help="3-aisle desk-scale layout instead of the full warehouse",
    )
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    csv_path = os.path.join(args.outdir, "ablation.csv")
    layout = (
        ["--aisles", "3", "--cross-aisles", "3", "--shelves", "1",
         "--min-products", "36", "--origin-offset", "2.0",
         "--trolley-capacity", "4"]
        if args.small
        else []
    )
    for window in args.windows:
        for orders in args.orders:
            inst = os.path.join(args.outdir, f"abl-d{window}-o{orders}.json")
            sh(
                "jobprp", "generate", *layout,
                "--orders", str(orders), "--window", str(window),
                "--seed", str(args.seed), "--out", inst,
            )
            sh(
                "jobprp", "ablate", "--instance", inst, "--mode", args.mode,
                "--time-limit", str(args.time_limit), "--csv", csv_path,
            )
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    print(f"wrote {len(rows)} benchmark rows to {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
