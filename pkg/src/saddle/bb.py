"""Safeguarded Barzilai-Borwein trial step-sizes for the outer iteration.

The secant data is ``s_k = v_k - v_{k-1}`` and ``y_k = g_k - g_{k-1}``
(defined from the second outer iteration on).  The two classic quotients

    BB1 = (s, y) / (y, y)        BB2 = (s, s) / (s, y)

require positive curvature ``(s, y) > 0``; otherwise the configured
fallback trial step is used.  The projected variants first map the
history into the tangent space of the unit sphere at the current
iterate:

    s_hat = -alpha_{k-1} * P_v(g_{k-1})      y_hat = g_k - P_v(g_{k-1})

with ``P_v u = u - (u, v) v``, which needs a single extra inner product
compared to the plain variants.  Alternating variants (abb/apbb) use the
first quotient on odd outer iterations and the second on even ones.
Every produced trial step is clamped to ``[lam_min, lam_max]``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import GridFunction
from .hilbert import GramOperator, UnitVector, tangent_project

BB_VARIANTS = ("bb1", "bb2", "abb")
PBB_VARIANTS = ("pbb1", "pbb2", "apbb")
TRIAL_SOURCES = ("fixed",) + BB_VARIANTS + PBB_VARIANTS


@dataclass(frozen=True)
class BBHistory:
    """Previous iterate, gradient and accepted step."""

    v: UnitVector
    g: GridFunction
    alpha: float


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def _first_quotient(k: int, variant: str) -> bool:
    """Whether iteration k uses the (s,y)/(y,y) quotient."""
    if variant in ("bb1", "pbb1"):
        return True
    if variant in ("bb2", "pbb2"):
        return False
    return k % 2 == 1  # alternating: first quotient on odd iterations


def bb_trial(hist: BBHistory, v: UnitVector, g: GridFunction, G: GramOperator,
             variant: str, k: int, lam0: float, lam_min: float,
             lam_max: float) -> float:
    if variant not in BB_VARIANTS:
        raise ValueError(f"unknown bb variant {variant!r}")
    s = GridFunction(v.values - hist.v.values, v.grid)
    y = GridFunction(g.values - hist.g.values, v.grid)
    sy = G.inner_arrays(s.values, y.values)
    if sy <= 0.0:
        return lam0
    if _first_quotient(k, variant):
        step = sy / G.inner_arrays(y.values, y.values)
    else:
        step = G.inner_arrays(s.values, s.values) / sy
    return _clamp(step, lam_min, lam_max)


def pbb_trial(hist: BBHistory, v: UnitVector, g: GridFunction, G: GramOperator,
              variant: str, k: int, lam0: float, lam_min: float,
              lam_max: float) -> float:
    if variant not in PBB_VARIANTS:
        raise ValueError(f"unknown projected bb variant {variant!r}")
    pg = tangent_project(v, hist.g, G)
    # history entirely along v projects to roundoff noise; treat as absent
    pg_sq = G.inner_arrays(pg.values, pg.values)
    g_sq = G.inner_arrays(hist.g.values, hist.g.values)
    if pg_sq <= 1e-28 * g_sq:
        return lam0
    s_hat = -hist.alpha * pg.values
    y_hat = g.values - pg.values
    sy = G.inner_arrays(s_hat, y_hat)
    if sy <= 0.0:
        return lam0
    if _first_quotient(k, variant):
        step = sy / G.inner_arrays(y_hat, y_hat)
    else:
        step = G.inner_arrays(s_hat, s_hat) / sy
    return _clamp(step, lam_min, lam_max)


def trial_step(hist, v, g, G, source: str, k: int, lam0: float,
               lam_min: float, lam_max: float) -> float:
    """Trial step for outer iteration k (fallback lam0 before history exists)."""
    if source == "fixed" or hist is None:
        return lam0
    if source in BB_VARIANTS:
        return bb_trial(hist, v, g, G, source, k, lam0, lam_min, lam_max)
    if source in PBB_VARIANTS:
        return pbb_trial(hist, v, g, G, source, k, lam0, lam_min, lam_max)
    raise ValueError(f"unknown trial-step source {source!r}")
