"""How often the deflated p-Laplacian optimum is a genuine eigenpair.

For random complex matrices the top eigenvector is found, the problem is
restricted to the kernel of its dual vector, and the restricted optimum is
classified as "eigenpair" or "deflation_coupled". At p = 2 the restriction
is orthogonal and every optimum is an eigenpair; away from p = 2 the
coupling to the dual direction appears.
"""
import argparse
from collections import Counter

import numpy as np

from quotients.errors import InconsistencyError
from quotients.generators import complex_gaussian
from quotients.plaplacian import (PLaplacianProblem, deflated_extremum, deflation_basis,
                                  p_extreme_multistart)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--exponents", default="1.5,2,3,4")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for p in (float(x) for x in args.exponents.split(",")):
        rng = np.random.default_rng(args.seed)
        counts = Counter()
        for trial in range(args.trials):
            prob = PLaplacianProblem.simple(complex_gaussian((args.n, args.n), rng), p)
            top = p_extreme_multistart(prob, starts=4, seed=trial, tol=1e-12)
            try:
                res = deflated_extremum(prob, deflation_basis(top.z, p), u=top.z, seed=trial)
                counts[res.classification] += 1
            except InconsistencyError:
                counts["inconsistent"] += 1
        summary = "  ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        print(f"p={p:4g}  {summary}")


if __name__ == "__main__":
    main()
