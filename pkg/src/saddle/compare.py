"""Method-comparison sweeps: run every (target, method) pair independently.

Each pair is an isolated single-threaded solve; pairs may execute in
separate processes.  Rows are gathered and sorted deterministically (by
the configured target order, then method order) before writing, so the
output is independent of scheduling up to the wall-time column.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

from .config import CompareConfig, load_support
from .errors import SaddleError
from .solver import lmm_solve

COMPARISON_COLUMNS = ("method", "target", "iters", "seconds", "final_energy",
                      "final_gradnorm", "converged")


def _run_pair(payload):
    """Worker: build the problem locally and run one (target, method) solve."""
    cfg: CompareConfig = payload["config"]
    target = next(t for t in cfg.targets if t.name == payload["target"])
    method = payload["method"]
    problem = cfg.problem.build()
    started = time.perf_counter()
    try:
        support = load_support(problem, target.support_files)
        v0 = target.initial.build_direction(problem)
        result = lmm_solve(problem, support, v0, cfg.solver_for(method))
        trace = result.trace
    except SaddleError as exc:
        trace = getattr(exc, "trace", None)
        row = {
            "method": method, "target": target.name,
            "iters": trace.final.k if trace is not None and trace.records else 0,
            "seconds": time.perf_counter() - started,
            "final_energy": math.nan, "final_gradnorm": math.nan,
            "converged": False, "error": str(exc),
        }
        return row
    return {
        "method": method, "target": target.name,
        "iters": trace.final.k,
        "seconds": time.perf_counter() - started,
        "final_energy": trace.final.energy,
        "final_gradnorm": trace.final.gradnorm,
        "converged": trace.converged,
        "error": "",
    }


def run_comparison(cfg: CompareConfig):
    """Execute the sweep; one row per (target, method) pair."""
    payloads = [{"config": cfg, "target": t.name, "method": m}
                for t in cfg.targets for m in cfg.methods]
    if cfg.concurrency > 1:
        with ProcessPoolExecutor(max_workers=cfg.concurrency) as pool:
            rows = list(pool.map(_run_pair, payloads))
    else:
        rows = [_run_pair(p) for p in payloads]
    target_order = {t.name: i for i, t in enumerate(cfg.targets)}
    method_order = {m: i for i, m in enumerate(cfg.methods)}
    rows.sort(key=lambda r: (target_order[r["target"]], method_order[r["method"]]))
    return rows


def write_comparison_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(COMPARISON_COLUMNS) + "\n")
        for r in rows:
            fh.write(",".join((
                r["method"], r["target"], str(r["iters"]),
                f"{r['seconds']:.6f}", f"{r['final_energy']:.17g}",
                f"{r['final_gradnorm']:.17g}",
                "true" if r["converged"] else "false",
            )) + "\n")
