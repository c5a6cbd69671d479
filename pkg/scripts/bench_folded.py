"""Folded iteration versus the dense oracle across generator families.

Writes one CSV per family into --out and prints a summary line for each.
"""
import argparse
from pathlib import Path

import numpy as np

from quotients.cli import BENCH_COLUMNS, RunConfig, bench

FAMILIES = ("random-hermitian-pencil", "fem-saddle", "quadratic-linearized", "identity")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="8,16,32")
    ap.add_argument("--instances", type=int, default=3)
    ap.add_argument("--shifts", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("bench_out"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    sizes = [int(s) for s in args.sizes.split(",")]

    for family in FAMILIES:
        cfg = RunConfig("bench", params={"family": family, "sizes": sizes, "instances": args.instances,
                                         "shifts": args.shifts, "seed": args.seed})
        rows = bench(cfg)
        with open(args.out / f"{family}.csv", "w") as fh:
            fh.write(",".join(BENCH_COLUMNS) + "\n")
            for r in rows:
                fh.write(",".join(str(r[c]) for c in BENCH_COLUMNS) + "\n")
        its = np.array([r["iterations"] for r in rows])
        err = max(r["abs_error"] for r in rows)
        conv = sum(r["converged"] for r in rows)
        print(f"{family:26s} runs={len(rows):3d} converged={conv:3d} "
              f"median_iters={np.median(its):6.1f} max_error={err:.2e}")


if __name__ == "__main__":
    main()
