"""Outer local-minimax iteration with full trace recording.

Given a problem, a support space L of previously found solutions and a
starting unit direction v0 not inside span(L), the solver repeats

    w_k   = peak point of the energy on [L, v_k]        (inner maximization)
    g_k   = Riesz gradient of the energy at w_k
    alpha = step size from the configured search rule
    v_k+1 = (v_k - alpha*d_k) / ||v_k - alpha*d_k||

until both the gradient norm and the strong-form residual fall below
their thresholds.  The step direction d_k is the gradient with its
(solver-tolerance sized) components along [L, v_k] removed, which keeps
the support component of v_k shrinking monotonically up to roundoff;
norms, decrease tests and stopping always use the unmodified gradient.

Every outer iteration appends one trace record; the terminal record
carries zeroed step fields and the final state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bb import BBHistory, TRIAL_SOURCES, trial_step
from .errors import (ConditioningError, InitialDirectionError,
                     PeakSelectionError, StepSearchError)
from .grid import GridFunction
from .hilbert import SupportSpace, UnitVector, decompose_against_support
from .peak import INNER_MAX_ITER, INNER_TOL_SCALE, peak_select
from .rules import (DEFAULT_M_MAX, advance_rule_state, backtracking_search,
                    exact_search, make_rule_state, reference_value)

RULES = ("exact", "armijo", "zh", "gll")
MIN_PERP = 1e-8

TRACE_COLUMNS = ("k", "lambda", "m", "alpha", "energy", "reference",
                 "gradnorm", "t", "tau", "vperp", "residual", "seconds")


@dataclass(frozen=True)
class SolverConfig:
    """Outer-iteration parameters; defaults follow the standard benchmark
    setting (sigma=1e-4, rho=0.2, M=10, eta=0.85, lam in [1e-6, 10])."""

    rule: str = "zh"
    trial: str = "bb1"
    sigma: float = 1e-4
    rho: float = 0.2
    M: int = 10
    eta: float = 0.85
    lam_min: float = 1e-6
    lam_max: float = 10.0
    lam0: float = 0.1
    grad_tol: float = 1e-5
    residual_tol: float = 5e-5
    max_iter: int = 5000
    t_floor: float = 1e-4
    m_max: int = DEFAULT_M_MAX
    inner_tol_scale: float = INNER_TOL_SCALE
    inner_max_iter: int = INNER_MAX_ITER

    def __post_init__(self):
        checks = [
            (self.rule in RULES, f"rule must be one of {RULES}"),
            (self.trial in TRIAL_SOURCES, f"trial must be one of {TRIAL_SOURCES}"),
            (0.0 < self.sigma < 1.0, "sigma must lie in (0, 1)"),
            (0.0 < self.rho < 1.0, "rho must lie in (0, 1)"),
            (self.M >= 1, "M must be >= 1"),
            (0.0 <= self.eta <= 1.0, "eta must lie in [0, 1]"),
            (0.0 < self.lam_min < self.lam_max, "need 0 < lam_min < lam_max"),
            (self.lam_min <= self.lam0 <= self.lam_max,
             "lam0 must lie in [lam_min, lam_max]"),
            (self.grad_tol > 0.0, "grad_tol must be positive"),
            (self.residual_tol > 0.0, "residual_tol must be positive"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.t_floor >= 0.0, "t_floor must be >= 0"),
            (self.m_max >= 1, "m_max must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)


@dataclass(frozen=True)
class TraceRecord:
    """One outer iteration: state at v_k plus the step chosen there."""

    k: int
    lam: float
    m: int
    alpha: float
    energy: float
    reference: float
    gradnorm: float
    t: float
    tau: float
    vperp: float
    residual: float
    seconds: float
    peak_evals: int = 0  # peak selections consumed by the step search

    def csv_fields(self):
        return (str(self.k), f"{self.lam:.17g}", str(self.m),
                f"{self.alpha:.17g}", f"{self.energy:.17g}",
                f"{self.reference:.17g}", f"{self.gradnorm:.17g}",
                f"{self.t:.17g}", f"{self.tau:.17g}", f"{self.vperp:.17g}",
                f"{self.residual:.17g}", f"{self.seconds:.6f}")


@dataclass
class SolverTrace:
    """Per-iteration records plus the termination verdict."""

    records: list
    termination: str
    converged: bool
    warnings: list = field(default_factory=list)
    peak_selections: int = 0

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    @property
    def iterations(self) -> int:
        return self.final.k

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for rec in self.records:
                fh.write(",".join(rec.csv_fields()) + "\n")


@dataclass
class SolveResult:
    solution: GridFunction
    trace: SolverTrace

    @property
    def converged(self) -> bool:
        return self.trace.converged

    @property
    def energy(self) -> float:
        return self.trace.final.energy


class _StepSpace:
    """Gram-orthonormal basis of span(L) for projecting step directions
    onto the orthogonal complement of [L, v_k]."""

    def __init__(self, problem, support: SupportSpace):
        self.G = problem.gram
        basis, images = [], []
        for u in support.basis:
            w = u.values.copy()
            for _ in range(2):  # re-orthogonalize once against earlier vectors
                for e, ge in zip(basis, images):
                    w = w - (w @ ge) * e
            n = self.G.norm_arrays(w)
            if n <= 1e-14:
                raise ConditioningError("support basis is numerically dependent")
            w = w / n
            basis.append(w)
            images.append(self.G.apply(w))
        self.basis = basis
        self.images = images

    def direction(self, v: UnitVector, g: GridFunction) -> GridFunction:
        d = g.values.copy()
        for e, ge in zip(self.basis, self.images):
            d = d - (d @ ge) * e
        gv = self.G.apply(v.values)
        vperp = v.values.copy()
        vperp_img = gv.copy()
        for e, ge in zip(self.basis, self.images):
            c = v.values @ ge
            vperp = vperp - c * e
            vperp_img = vperp_img - c * ge
        nsq = float(vperp @ vperp_img)
        if nsq > 1e-24:
            d = d - (float(d @ vperp_img) / nsq) * vperp
        return GridFunction(d, v.grid)


def lmm_solve(problem, support: SupportSpace, v0: UnitVector,
              cfg: SolverConfig = SolverConfig(), callback=None) -> SolveResult:
    """Run the outer iteration until convergence, degeneracy or the cap.

    Returns the final peak point and the trace.  Peak-selection and
    step-search failures raise with the partial trace attached; the
    iteration cap and a collapsing inner maximizer (t below the floor)
    terminate normally with ``converged=False``.
    """
    G = problem.gram
    dec0 = decompose_against_support(v0, support, G)
    if dec0.perp_norm < MIN_PERP:
        raise InitialDirectionError(
            f"initial direction lies in the support space "
            f"(orthogonal component {dec0.perp_norm:.3e} < {MIN_PERP:g})"
        )
    L = support.with_reference(dec0.coeffs) if len(support) else support
    steps = _StepSpace(problem, L)

    counter = {"n": 0}

    def select(vv, warm):
        counter["n"] += 1
        return peak_select(problem, L, vv, warm,
                           tol_scale=cfg.inner_tol_scale,
                           max_iter=cfg.inner_max_iter)

    warm_c = np.zeros(len(L))
    if len(L):
        warm_c[-1] = 1.0  # start the inner search at v0 plus the newest solution
    records, warnings = [], []
    started = time.perf_counter()

    def fail(exc):
        exc.trace = SolverTrace(records, f"failed: {exc}", False, warnings,
                                counter["n"])
        return exc

    try:
        pk = select(v0, (1.0, warm_c))
    except PeakSelectionError as exc:
        raise fail(exc)
    state = make_rule_state(cfg.rule, pk.energy, cfg.M)
    hist = None
    v = v0
    k = 0

    while True:
        gradnorm = pk.grad_norm
        residual = problem.residual_inf(pk.w)
        dec = decompose_against_support(v, L, G)
        ref = reference_value(state, pk.energy)
        grad_ok = gradnorm < cfg.grad_tol
        res_ok = residual < cfg.residual_tol

        terminal = None
        if grad_ok and res_ok:
            terminal = "converged"
        elif pk.t < cfg.t_floor:
            terminal = "degenerate-t"
            warnings.append(
                f"iteration {k}: inner maximizer t={pk.t:.3e} fell below the "
                f"floor {cfg.t_floor:g}; the iterate is collapsing into the "
                "support space"
            )
        elif k >= cfg.max_iter:
            terminal = ("gradient-converged-residual-limited" if grad_ok
                        else "max-iterations")
        if terminal is not None:
            rec = TraceRecord(k, 0.0, 0, 0.0, pk.energy, ref, gradnorm, pk.t,
                              dec.tau, dec.perp_norm, residual,
                              time.perf_counter() - started, 0)
            records.append(rec)
            if callback is not None:
                callback(rec, v, pk)
            trace = SolverTrace(records, terminal, terminal == "converged",
                                warnings, counter["n"])
            return SolveResult(pk.w, trace)

        lam = trial_step(hist, v, pk.grad, G, cfg.trial, k, cfg.lam0,
                         cfg.lam_min, cfg.lam_max)
        direction = steps.direction(v, pk.grad)
        try:
            if cfg.rule == "exact":
                alpha, v_next, pk_next, evals, warned = exact_search(
                    problem, L, v, pk, direction, cfg.lam_max, select=select)
                m = 0
                if warned:
                    warnings.append(
                        f"iteration {k}: no scan point decreased the energy; "
                        "took the smallest step"
                    )
            else:
                alpha, v_next, pk_next, m, evals = backtracking_search(
                    problem, L, v, pk, direction, lam, ref, cfg.sigma,
                    cfg.rho, cfg.m_max, select=select)
        except (PeakSelectionError, StepSearchError) as exc:
            raise fail(exc)

        rec = TraceRecord(k, lam, m, alpha, pk.energy, ref, gradnorm, pk.t,
                          dec.tau, dec.perp_norm, residual,
                          time.perf_counter() - started, evals)
        records.append(rec)
        if callback is not None:
            callback(rec, v, pk)

        state = advance_rule_state(state, pk_next.energy, cfg.eta)
        hist = BBHistory(v=v, g=pk.grad, alpha=alpha)
        v, pk = v_next, pk_next
        k += 1
