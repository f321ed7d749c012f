#!/usr/bin/env python3
"""Multiple solutions of -lap(u) + u = 0 with du/dn = u^3 on (-1,1)^2.

Starting directions are a-harmonic functions driven by boundary flux data
rho0(theta); theta is the scaled arc length along the boundary, counter-
clockwise from the corner (-1,-1).
"""

import argparse
import time
from pathlib import Path

import saddle

# target -> (support names, rho0 expression)
RECIPES = {
    "u1": ([], "1 - cos(theta)"),
    "u2": ([], "1 + sin(theta - pi/4)"),
    "u3": ([], "1 + cos(2*theta)"),
    "u4": (["u1", "u3"], "-cos(theta)"),
    "u5": ([], "1"),
    "u6": ([], "-cos(theta)"),
    "u7": (["u1", "u3"], "-cos(2*theta)"),
    "u8": (["u1", "u6"], "1 - sin(theta)"),
    "u9": (["u1", "u2", "u3"], "1 + sin(theta)"),
    "u10": ([], "cos(2*theta)"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--targets", nargs="*", default=list(RECIPES))
    ap.add_argument("--out", type=Path, default=Path("runs/neumann"))
    args = ap.parse_args()

    grid = saddle.GridSpec.rectangle(-1, 1, -1, 1, args.n)
    problem = saddle.NeumannProblem(grid, a=args.a)
    cfg = saddle.SolverConfig(rule="zh", trial="bb1")
    args.out.mkdir(parents=True, exist_ok=True)

    solutions = {}
    print(f"{'target':>7s} {'support':>16s} {'rho0':>22s} {'E':>10s} "
          f"{'iters':>6s} {'defect':>9s} {'seconds':>8s}")
    for name in args.targets:
        support_names, rho_text = RECIPES[name]
        missing = [s for s in support_names if s not in solutions]
        if missing:
            raise SystemExit(f"{name}: support rows {missing} not computed yet")
        support = saddle.SupportSpace([solutions[s] for s in support_names],
                                      problem.gram)
        v0 = problem.initial_direction(saddle.BoundaryData(rho_text))
        started = time.perf_counter()
        result = saddle.lmm_solve(problem, support, v0, cfg)
        seconds = time.perf_counter() - started
        solutions[name] = result.solution
        saddle.write_solution(result.solution, args.out / f"{name}.grid")
        defect = problem.interior_defect(result.solution)
        flag = "" if result.converged else f"  [{result.trace.termination}]"
        print(f"{name:>7s} {str(support_names):>16s} {rho_text:>22s} "
              f"{result.energy:10.4f} {result.trace.final.k:6d} "
              f"{defect:9.2e} {seconds:8.2f}{flag}")


if __name__ == "__main__":
    main()
