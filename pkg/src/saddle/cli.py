"""Command-line entry points.

    saddle solve <config>     run one solve; writes solution.grid, trace.csv
                              and a key=value summary into the output dir
    saddle compare <config>   run a (target, method) sweep; writes a CSV
    saddle info <file.grid>   describe a stored solution

Exit codes: 0 converged, 1 not converged (trace still written), 2 invalid
input.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .compare import run_comparison, write_comparison_csv
from .config import CompareConfig, RunConfig, load_support
from .errors import (ConfigError, GridFileError, InitialDirectionError,
                     PeakSelectionError, SaddleError, StepSearchError)
from .grid import read_solution, write_solution
from .solver import lmm_solve


def _write_summary(path, trace, seconds):
    final = trace.final if trace.records else None
    lines = []
    if final is not None:
        lines += [
            f"energy={final.energy:.17g}",
            f"gradnorm={final.gradnorm:.17g}",
            f"residual={final.residual:.17g}",
            f"iterations={final.k}",
        ]
    lines += [
        f"termination={trace.termination}",
        f"converged={'true' if trace.converged else 'false'}",
        f"peak_selections={trace.peak_selections}",
        f"seconds={seconds:.6f}",
    ]
    for w in trace.warnings:
        lines.append(f"warning={w}")
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_solve(args) -> int:
    cfg = RunConfig.from_file(args.config)
    problem = cfg.problem.build()
    support = load_support(problem, cfg.support_files)
    v0 = cfg.initial.build_direction(problem)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    try:
        result = lmm_solve(problem, support, v0, cfg.solver)
    except (PeakSelectionError, StepSearchError) as exc:
        seconds = time.perf_counter() - started
        trace = getattr(exc, "trace", None)
        print(f"solve failed: {exc}", file=sys.stderr)
        if trace is not None:
            trace.write_csv(out / "trace.csv")
            _write_summary(out / "summary", trace, seconds)
        return 1
    seconds = time.perf_counter() - started
    write_solution(result.solution, out / "solution.grid")
    result.trace.write_csv(out / "trace.csv")
    _write_summary(out / "summary", result.trace, seconds)
    final = result.trace.final
    print(f"{result.trace.termination}: E={final.energy:.6f} "
          f"|g|={final.gradnorm:.3e} residual={final.residual:.3e} "
          f"iterations={final.k} ({seconds:.2f}s)")
    return 0 if result.converged else 1


def cmd_compare(args) -> int:
    cfg = CompareConfig.from_file(args.config)
    rows = run_comparison(cfg)
    out = Path(cfg.out_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(rows, out)
    failures = [r for r in rows if not r["converged"]]
    for r in rows:
        print(f"{r['target']:>10s} {r['method']:>6s}  iters={r['iters']:<6d} "
              f"E={r['final_energy']:.6f}  converged={r['converged']}")
    print(f"wrote {out} ({len(rows)} rows, {len(failures)} not converged)")
    return 0 if not failures else 1


def cmd_info(args) -> int:
    w = read_solution(args.solution)
    vals = w.values
    print(f"grid: {w.grid.grid_id}")
    print(f"nodes: {w.grid.npoints}")
    print(f"min: {vals.min():.17g}")
    print(f"max: {vals.max():.17g}")
    print(f"maxabs: {abs(vals).max():.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddle",
        description="Find unstable saddle points of variational problems "
                    "by local minimax iterations.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="run one configured solve")
    p_solve.add_argument("config")
    p_solve.set_defaults(fn=cmd_solve)
    p_cmp = sub.add_parser("compare", help="run a target/method sweep")
    p_cmp.add_argument("config")
    p_cmp.set_defaults(fn=cmd_compare)
    p_info = sub.add_parser("info", help="describe a stored solution")
    p_info.add_argument("solution")
    p_info.set_defaults(fn=cmd_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, GridFileError, InitialDirectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SaddleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
