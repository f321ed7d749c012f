"""Step-size search rules for the outer minimax iteration.

Four rules choose the step alpha along the retraction curve
``alpha -> v(alpha) = (v - alpha*d)/||v - alpha*d||``:

* ``armijo``  -- backtracking with the monotone sufficient-decrease test
  ``E(p(v(alpha))) <= E_k - sigma*alpha*t_k*||g_k||^2``.
* ``zh``      -- nonmonotone variant comparing against a recursively
  weighted average C_k of past energies (weights eta, normalizer Q).
* ``gll``     -- nonmonotone variant comparing against the maximum energy
  over a sliding window of the last M iterations.
* ``exact``   -- minimizes ``alpha -> E(p(v(alpha)))`` over (0, lam_max]
  by a coarse logarithmic scan plus golden-section refinement.

With eta == 0 the zh rule and with M == 1 the gll rule both reduce
exactly to the armijo rule.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .errors import StepSearchError
from .hilbert import GridFunction, SupportSpace, UnitVector, retract
from .peak import PeakPoint, peak_select

DEFAULT_M_MAX = 60
EXACT_SCAN_POINTS = 32
EXACT_SCAN_FLOOR = 1e-6  # smallest scan point, relative to lam_max
EXACT_REFINE_REL = 1e-4
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ArmijoState:
    pass


@dataclass(frozen=True)
class ExactState:
    pass


@dataclass(frozen=True)
class ZHState:
    """Weighted-average reference: Q_0 = 1, C_0 = E_0, then
    Q' = eta*Q + 1 and C' = (eta*Q*C + E_next)/Q'."""

    Q: float
    C: float


@dataclass(frozen=True)
class GLLState:
    """Sliding window of the last min(M, k+1) peak energies."""

    M: int
    window: tuple


def make_rule_state(rule: str, energy0: float, M: int = 10):
    if rule == "armijo":
        return ArmijoState()
    if rule == "exact":
        return ExactState()
    if rule == "zh":
        return ZHState(Q=1.0, C=float(energy0))
    if rule == "gll":
        if M < 1:
            raise ValueError(f"gll window M must be >= 1, got {M}")
        return GLLState(M=int(M), window=(float(energy0),))
    raise ValueError(f"unknown step-size rule {rule!r}")


def reference_value(state, energy_k: float) -> float:
    """The value the sufficient-decrease test compares against."""
    if isinstance(state, ZHState):
        return state.C
    if isinstance(state, GLLState):
        return max(state.window)
    return float(energy_k)


def update_zh_state(state: ZHState, eta_k: float, energy_next: float) -> ZHState:
    """Advance the weighted-average recursion by one accepted step."""
    if not 0.0 <= eta_k <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta_k}")
    q_next = eta_k * state.Q + 1.0
    c_next = (eta_k * state.Q * state.C + energy_next) / q_next
    return ZHState(Q=q_next, C=c_next)


def advance_rule_state(state, energy_next: float, eta: float = 0.0):
    """State transition after an accepted step."""
    if isinstance(state, ZHState):
        return update_zh_state(state, eta, energy_next)
    if isinstance(state, GLLState):
        window = deque(state.window, maxlen=state.M)
        window.append(float(energy_next))
        return replace(state, window=tuple(window))
    return state


def backtracking_search(problem, support: SupportSpace, v: UnitVector,
                        pk: PeakPoint, direction: GridFunction, lam: float,
                        reference: float, sigma: float, rho: float,
                        m_max: int = DEFAULT_M_MAX, select=None):
    """Find the largest step ``lam * rho**m`` passing the decrease test
    ``E(p(v(alpha))) <= reference - sigma*alpha*t_k*||g_k||^2``.

    Every trial's peak selection is warm-started from the current peak
    coefficients.  Returns ``(alpha, v_next, pk_next, m, evaluations)``.
    """
    if select is None:
        select = lambda vv, warm: peak_select(problem, support, vv, warm)
    G = problem.gram
    slope = sigma * pk.t * pk.grad_norm ** 2
    warm = pk.warm_start
    evals = 0
    for m in range(m_max + 1):
        alpha = lam * rho ** m
        v_trial = retract(v, direction, alpha, G)
        pk_trial = select(v_trial, warm)
        evals += 1
        if pk_trial.energy <= reference - alpha * slope:
            return alpha, v_trial, pk_trial, m, evals
    raise StepSearchError(
        f"no acceptable step within {m_max} backtracks from lam={lam:.3e} "
        f"(reference={reference:.6g}, slope={slope:.3e})"
    )


def exact_search(problem, support: SupportSpace, v: UnitVector, pk: PeakPoint,
                 direction: GridFunction, lam_max: float,
                 scan_points: int = EXACT_SCAN_POINTS,
                 refine_rel: float = EXACT_REFINE_REL, select=None):
    """Approximate the global minimizer of ``alpha -> E(p(v(alpha)))`` on
    ``(0, lam_max]``: coarse logarithmic scan, then golden-section
    refinement of the best bracket down to the relative width target.

    Returns ``(alpha, v_next, pk_next, evaluations, warned)`` where
    ``warned`` flags the fallback when no scan point decreases the energy
    (the smallest scan point is returned).
    """
    if select is None:
        select = lambda vv, warm: peak_select(problem, support, vv, warm)
    G = problem.gram
    warm = pk.warm_start
    evals = 0

    cache = {}

    def probe(alpha):
        nonlocal evals
        if alpha not in cache:
            v_trial = retract(v, direction, alpha, G)
            cache[alpha] = (v_trial, select(v_trial, warm))
            evals += 1
        return cache[alpha]

    alphas = np.geomspace(lam_max * EXACT_SCAN_FLOOR, lam_max, scan_points)
    energies = np.array([probe(a)[1].energy for a in alphas])
    best_i = int(np.argmin(energies))

    if energies[best_i] >= pk.energy:
        a0 = float(alphas[0])
        v_next, pk_next = probe(a0)
        return a0, v_next, pk_next, evals, True

    lo = math.log(alphas[max(best_i - 1, 0)])
    hi = math.log(alphas[min(best_i + 1, scan_points - 1)])
    best_alpha = float(alphas[best_i])
    best_energy = float(energies[best_i])

    def consider(u):
        nonlocal best_alpha, best_energy
        alpha = math.exp(u)
        e = probe(alpha)[1].energy
        if e < best_energy:
            best_alpha, best_energy = alpha, e
        return e

    u1 = hi - _GOLDEN * (hi - lo)
    u2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = consider(u1), consider(u2)
    while hi - lo > refine_rel:
        if f1 <= f2:
            hi, u2, f2 = u2, u1, f1
            u1 = hi - _GOLDEN * (hi - lo)
            f1 = consider(u1)
        else:
            lo, u1, f1 = u1, u2, f2
            u2 = lo + _GOLDEN * (hi - lo)
            f2 = consider(u2)

    v_next, pk_next = probe(best_alpha)
    return best_alpha, v_next, pk_next, evals, False
