#!/usr/bin/env python3
"""Compute a hierarchy of solutions of -lap(u) = u^3 on (-1,1)^2.

Each target uses previously found solutions as its support space and an
indicator-load starting direction; solutions and traces are written under
the output directory so later rows can chain on earlier ones.
"""

import argparse
import time
from pathlib import Path

import saddle

# target -> (support names, omega1, omega2)
RECIPES = {
    "u1": ([], "all", "empty"),
    "u2": (["u1"], "halfplane(1,0,0)", "complement(halfplane(1,0,0))"),
    "u3": (["u1"], "halfplane(0,1,0)", "complement(halfplane(0,1,0))"),
    "u4": (["u1"], "halfplane(1,1,0)", "complement(halfplane(1,1,0))"),
    "u5": (["u1"], "halfplane(1,-1,0)", "complement(halfplane(1,-1,0))"),
    "u6": (["u1", "u2"], "band(1,0,0.2)", "complement(band(1,0,0.2))"),
    "u7": (["u1", "u4"], "band(1,1,0.3)", "complement(band(1,1,0.3))"),
    "u8": (["u1", "u2", "u3"], "union(quadrant(1,1),quadrant(-1,-1))",
           "complement(union(quadrant(1,1),quadrant(-1,-1)))"),
    "u9": (["u1", "u4", "u5"], "absdiff", "complement(absdiff)"),
    "u10": (["u1", "u2", "u3", "u8"], "complement(disc(0.5))", "disc(0.5)"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128, help="grid subdivisions")
    ap.add_argument("--ell", type=float, default=0.0,
                    help="radial weight exponent (0 = autonomous cubic)")
    ap.add_argument("--rule", default="zh", choices=["exact", "armijo", "zh", "gll"])
    ap.add_argument("--trial", default="bb1",
                    choices=["fixed", "bb1", "bb2", "pbb1", "pbb2", "abb", "apbb"])
    ap.add_argument("--targets", nargs="*", default=list(RECIPES),
                    help="subset of targets (support rows must come first)")
    ap.add_argument("--out", type=Path, default=Path("runs/lane_emden"))
    args = ap.parse_args()

    grid = saddle.GridSpec.rectangle(-1, 1, -1, 1, args.n)
    problem = saddle.DirichletProblem(grid, ell=args.ell)
    cfg = saddle.SolverConfig(rule=args.rule, trial=args.trial)
    args.out.mkdir(parents=True, exist_ok=True)

    solutions = {}
    print(f"{'target':>7s} {'support':>16s} {'E':>12s} {'iters':>6s} "
          f"{'|g|':>9s} {'seconds':>8s}")
    for name in args.targets:
        support_names, om1, om2 = RECIPES[name]
        missing = [s for s in support_names if s not in solutions]
        if missing:
            raise SystemExit(f"{name}: support rows {missing} not computed yet")
        support = saddle.SupportSpace([solutions[s] for s in support_names],
                                      problem.gram)
        v0 = problem.initial_direction(saddle.parse_region(om1),
                                       saddle.parse_region(om2))
        started = time.perf_counter()
        result = saddle.lmm_solve(problem, support, v0, cfg)
        seconds = time.perf_counter() - started
        final = result.trace.final
        solutions[name] = result.solution
        saddle.write_solution(result.solution, args.out / f"{name}.grid")
        result.trace.write_csv(args.out / f"{name}_trace.csv")
        flag = "" if result.converged else f"  [{result.trace.termination}]"
        print(f"{name:>7s} {str(support_names):>16s} {final.energy:12.4f} "
              f"{final.k:6d} {final.gradnorm:9.2e} {seconds:8.2f}{flag}")


if __name__ == "__main__":
    main()
