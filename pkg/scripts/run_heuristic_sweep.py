#!/usr/bin/env python3
"""Compare the three savings-heuristic variants against the exact solver.

For each generated instance: variant (i) estimated routing throughout,
variant (ii) exact routing of the final batches, variant (iii) exact
routing inside the savings computation, and the exact branch-and-cut
optimum.  Writes one CSV row per instance.

Usage: run_heuristic_sweep.py [--outdir results] [--orders 3 4 5]
"""

import argparse
import csv
import os
import sys

from jobprp.engine import SolveConfig, solve_jobprp
from jobprp.heuristics import run_variant
from jobprp.instance import build_instance, combine_orders, synth_orders
from jobprp.warehouse import LayoutConfig, build_layout, make_catalog


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--orders", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--window", type=int, default=5)
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    layout = build_layout(
        LayoutConfig(
            num_aisles=3,
            num_cross_aisles=3,
            num_shelves=1,
            min_products=36,
            origin_offset=2.0,
        ),
        make_catalog(36),
    )
    products = sorted(layout.placement)
    os.makedirs(args.outdir, exist_ok=True)
    out = os.path.join(args.outdir, "heuristics.csv")
    rows = []
    for orders in args.orders:
        for seed in args.seeds:
            log = synth_orders(seed=seed, num_customers=orders, products=products)
            inst = build_instance(
                layout,
                combine_orders(log, args.window)[:orders],
                trolley_capacity=4,
                name=f"heur-o{orders}-s{seed}",
            )
            exact = solve_jobprp(
                inst, SolveConfig(time_limit=args.time_limit)
            ).objective
            row = {"instance": inst.name, "exact": f"{exact:.1f}"}
            for variant in ("i", "ii", "iii"):
                sol = run_variant(inst, variant, time_limit=args.time_limit)
                row[f"variant_{variant}"] = f"{sol.value:.1f}"
            rows.append(row)
            print(row, flush=True)
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
