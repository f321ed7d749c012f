"""Inner maximization: local peak of the energy on the half-space [L, v].

For a unit direction v and a support space spanned by u_1..u_m, the peak
point is a local maximizer of ``(t, c) -> E(t*v + sum_i c_i u_i)`` with
t >= 0.  The maximizer is found by BFGS on the negated energy with
analytic first derivatives (each component is one duality pairing, no
linear solve) and Armijo backtracking.  Nonnegativity of t is kept by
joint sign reflection, which is energy-preserving for odd nonlinearities.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import PeakSelectionError
from .grid import GridFunction
from .hilbert import SupportSpace, UnitVector

INNER_TOL_SCALE = 1e-10
INNER_MAX_ITER = 200
_LS_SHRINK = 0.5
_LS_C1 = 1e-4
_LS_MAX_BACKTRACKS = 60
_CURVATURE_FLOOR = 1e-12


class PeakPoint:
    """Local maximizer ``w = t*v + sum_i coeffs_i u_i`` with its energy.

    The Riesz gradient and its Gram norm are computed lazily from the
    stashed weak residual of the final inner iterate.
    """

    def __init__(self, problem, v: UnitVector, support: SupportSpace,
                 t: float, coeffs: np.ndarray, values: np.ndarray,
                 energy: float, inner_grad: np.ndarray,
                 weak_residual: np.ndarray, iterations: int, evaluations: int):
        self._problem = problem
        self.v = v
        self.support = support
        self.t = float(t)
        self.coeffs = np.array(coeffs, dtype=float)
        self.w = GridFunction(values, problem.grid)
        self.energy = float(energy)
        self.inner_grad = np.array(inner_grad, dtype=float)
        self._weak_residual = weak_residual
        self.iterations = iterations
        self.evaluations = evaluations

    @cached_property
    def grad(self) -> GridFunction:
        return GridFunction(self._problem.gram.solve(self._weak_residual),
                            self._problem.grid)

    @cached_property
    def grad_norm(self) -> float:
        # G g = r, so ||g||^2 = g . r
        return math.sqrt(max(float(self.grad.values @ self._weak_residual), 0.0))

    @property
    def warm_start(self):
        return self.t, self.coeffs


def peak_select(problem, support: SupportSpace, v: UnitVector, warm,
                tol_scale: float = INNER_TOL_SCALE,
                max_iter: int = INNER_MAX_ITER) -> PeakPoint:
    """Maximize the energy over [L, v] starting from the warm point.

    ``warm`` is ``(t, coeffs)``.  Convergence requires every component of
    the inner gradient (the pairings of the current point with v and each
    support element) to fall below ``tol_scale * (1 + |E|)``.
    """
    warm_t, warm_c = warm
    warm_c = np.asarray(warm_c, dtype=float)
    if warm_c.shape != (len(support),):
        raise ValueError(
            f"warm start has {warm_c.size} coefficients, support has {len(support)}"
        )
    theta = np.concatenate(([float(warm_t)], warm_c))
    if not np.all(np.isfinite(theta)):
        raise ValueError("warm start must be finite")
    if theta[0] < 0.0:
        theta = -theta

    basis = np.vstack([v.values] + [u.values for u in support.basis])
    evals = 0

    def objective(th):
        nonlocal evals
        evals += 1
        w = th @ basis
        energy, residual = problem._energy_and_weak_residual_arr(w)
        return energy, basis @ residual, residual, w

    energy, grad, residual, w = objective(theta)
    dim = theta.size
    ident = np.eye(dim)
    hess_inv = ident.copy()
    first_update = True

    def converged(e, g):
        return np.max(np.abs(g)) <= tol_scale * (1.0 + abs(e))

    def build(iterations):
        return PeakPoint(problem, v, support, theta[0], theta[1:], w,
                         energy, grad, residual, iterations, evals)

    if converged(energy, grad):
        return build(0)

    for it in range(1, max_iter + 1):
        step = hess_inv @ grad
        ascent = float(grad @ step)
        if not np.isfinite(ascent) or ascent <= 0.0:
            hess_inv = ident.copy()
            first_update = True
            step = grad.copy()
            ascent = float(grad @ grad)
        alpha = 1.0
        accepted = False
        for _ in range(_LS_MAX_BACKTRACKS):
            trial = theta + alpha * step
            e_new, g_new, r_new, w_new = objective(trial)
            if np.isfinite(e_new):
                needed = _LS_C1 * alpha * ascent
                if e_new >= energy + needed:
                    accepted = True
                    break
                # When the required increase is below the floating-point
                # resolution of the energy, the sufficient-increase test
                # carries no information; accept on strict gradient progress.
                if (needed <= 8.0 * np.finfo(float).eps * (1.0 + abs(energy))
                        and np.max(np.abs(g_new)) < np.max(np.abs(grad))):
                    accepted = True
                    break
            alpha *= _LS_SHRINK
        if not accepted:
            raise PeakSelectionError(
                f"inner line search stalled after {it} iterations "
                f"(|grad|={np.max(np.abs(grad)):.3e}, E={energy:.6g})"
            )
        s = trial - theta
        y = grad - g_new  # gradient change of the negated energy
        if trial[0] < 0.0:
            # joint sign flip: exact for odd nonlinearities
            trial, g_new, r_new, w_new = -trial, -g_new, -r_new, -w_new
            hess_inv = ident.copy()
            first_update = True
        else:
            sy = float(s @ y)
            if sy > _CURVATURE_FLOOR * np.linalg.norm(s) * np.linalg.norm(y):
                if first_update:
                    hess_inv = (sy / float(y @ y)) * ident
                    first_update = False
                rho = 1.0 / sy
                left = ident - rho * np.outer(s, y)
                hess_inv = left @ hess_inv @ left.T + rho * np.outer(s, s)
        theta, energy, grad, residual, w = trial, e_new, g_new, r_new, w_new
        if converged(energy, grad):
            return build(it)

    raise PeakSelectionError(
        f"inner maximization did not converge in {max_iter} iterations "
        f"(|grad|={np.max(np.abs(grad)):.3e}, tol={tol_scale * (1 + abs(energy)):.3e})"
    )


def ray_maximizer_power(problem, v: UnitVector):
    """Closed-form ray maximizer for cubic-type power nonlinearities with an
    empty support space: maximizing ``E(t v) = t^2/2 - t^4 D / 4`` over the
    discrete quadrature ``D`` gives ``t = D**-0.5`` and peak energy
    ``1/(4 D)``.  Exact for the discrete energy; used as an oracle.
    """
    nl = problem.nonlinearity
    if getattr(nl, "gamma", None) != 3.0:
        raise ValueError("closed form requires the cubic power nonlinearity")
    quartic = float(problem.quad_weights @ (nl.weight * v.values ** 4))
    if quartic <= 0.0:
        raise ValueError("degenerate direction: quartic form vanishes")
    return quartic ** -0.5, 0.25 / quartic
