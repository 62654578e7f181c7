#!/usr/bin/env python3
"""Sweep the arrival-wave size K on one instance.

Smaller K means orders are committed to trolleys earlier (less information,
shorter customer wait); K equal to the order count reproduces the joint
optimum.  Appends one row per K to a CSV.

Usage: run_tradeoff.py --instance inst.json [--ks 1 2 5 ...]
"""

import argparse
import subprocess
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instance", required=True)
    ap.add_argument("--ks", type=int, nargs="+", default=[1, 2, 3, 5, 10, 20])
    ap.add_argument("--csv", default="tradeoff.csv")
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    ks = ",".join(str(k) for k in args.ks)
    cmd = [
        "jobprp", "tradeoff", "--instance", args.instance,
        "--k", ks, "--csv", args.csv, "--time-limit", str(args.time_limit),
    ]
    print("+", " ".join(cmd), flush=True)
    subprocess.run(cmd, check=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
