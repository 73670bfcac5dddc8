#!/usr/bin/env python3
"""Breakdown curve: recovery SNR versus the number of active sources.

Sweeps the exact activity count k for several annealing factors c and
reports where the mean SNR collapses. Slower annealing (larger c) pushes the
breakdown toward the uniqueness limit n/2 at a higher computational cost.

Run:
    python scripts/sparsity_breakdown.py --runs 10 --out breakdown.csv
"""

import argparse

from sl0 import SweepPoint, run_sweep, write_sweep_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=31000)
    parser.add_argument("--k", default="80,110,140,170,190,200", help="comma list of activity counts")
    parser.add_argument("--c", default="0.5,0.8,0.95", help="comma list of annealing factors")
    parser.add_argument("--snr-floor", type=float, default=15.0, help="breakdown threshold in dB")
    parser.add_argument("--out", default="breakdown.csv")
    args = parser.parse_args()

    ks = [int(v) for v in args.k.split(",")]
    cs = [float(v) for v in args.c.split(",")]
    base = SweepPoint(exact_activation=True, schedule=None, sigma1=1.0, sigma_min=0.01)
    rows = run_sweep({"c": cs, "k": ks}, runs=args.runs, base_seed=args.seed, base=base)

    for c in cs:
        means = {row["k"]: row["snr_mean_db"] for row in rows if row["c"] == c}
        passing = [k for k in ks if means[k] >= args.snr_floor]
        breakdown = max(passing) if passing else None
        curve = " ".join(f"k={k}:{means[k]:5.1f}" for k in ks)
        print(f"c={c}: {curve}  -> breakdown {breakdown}")
    write_sweep_csv(rows, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
