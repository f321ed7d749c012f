#!/usr/bin/env python3
"""Iteration/time comparison of the step-size rules on a solution hierarchy.

Runs every (target, method) pair independently and prints a table of outer
iterations, total peak selections and wall time; also writes a CSV.
"""

import argparse
import time
from pathlib import Path

import saddle
from lane_emden_hierarchy import RECIPES

METHODS = {
    "exact": saddle.SolverConfig(rule="exact", trial="fixed"),
    "armijo": saddle.SolverConfig(rule="armijo", trial="fixed"),
    "bb1": saddle.SolverConfig(rule="zh", trial="bb1"),
    "pbb1": saddle.SolverConfig(rule="zh", trial="pbb1"),
    "bb2": saddle.SolverConfig(rule="zh", trial="bb2"),
    "pbb2": saddle.SolverConfig(rule="zh", trial="pbb2"),
    "abb": saddle.SolverConfig(rule="zh", trial="abb"),
    "apbb": saddle.SolverConfig(rule="zh", trial="apbb"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--ell", type=float, default=0.0)
    ap.add_argument("--targets", nargs="*", default=["u1", "u2", "u3", "u4", "u5"])
    ap.add_argument("--methods", nargs="*", default=list(METHODS))
    ap.add_argument("--out", type=Path, default=Path("runs/comparison.csv"))
    args = ap.parse_args()

    grid = saddle.GridSpec.rectangle(-1, 1, -1, 1, args.n)
    problem = saddle.DirichletProblem(grid, ell=args.ell)

    # precompute the support chain with the default accelerated settings
    solutions = {}
    needed = {s for t in args.targets for s in RECIPES[t][0]}
    for name in list(RECIPES):
        if name in needed or name in args.targets:
            sup, om1, om2 = RECIPES[name]
            support = saddle.SupportSpace([solutions[s] for s in sup], problem.gram)
            v0 = problem.initial_direction(saddle.parse_region(om1),
                                           saddle.parse_region(om2))
            res = saddle.lmm_solve(problem, support, v0, METHODS["bb1"])
            solutions[name] = res.solution

    rows = []
    header = f"{'target':>7s} " + "".join(f"{m:>18s}" for m in args.methods)
    print(header + "   (iterations / peak selections / seconds)")
    for target in args.targets:
        sup, om1, om2 = RECIPES[target]
        support = saddle.SupportSpace([solutions[s] for s in sup], problem.gram)
        v0 = problem.initial_direction(saddle.parse_region(om1),
                                       saddle.parse_region(om2))
        cells = []
        for method in args.methods:
            started = time.perf_counter()
            res = saddle.lmm_solve(problem, support, v0, METHODS[method])
            seconds = time.perf_counter() - started
            final = res.trace.final
            rows.append((method, target, final.k, seconds, final.energy,
                         final.gradnorm, res.converged))
            cells.append(f"{final.k:4d}/{res.trace.peak_selections:5d}/{seconds:6.2f}")
        print(f"{target:>7s} " + "".join(f"{c:>18s}" for c in cells))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write("method,target,iters,seconds,final_energy,final_gradnorm,converged\n")
        for m, t, it, sec, e, gn, conv in rows:
            fh.write(f"{m},{t},{it},{sec:.6f},{e:.17g},{gn:.17g},"
                     f"{'true' if conv else 'false'}\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
