"""Gram-weighted vector algebra on grid functions.

The discrete Hilbert space is the set of grid functions with the inner
product ``(u, v) = u^T G v`` induced by a symmetric positive-definite
sparse operator G (stiffness or stiffness-plus-mass form).  This module
provides the inner product, normalization, the unit-sphere retraction
``v(alpha) = (v - alpha*g) / ||v - alpha*g||``, tangent projection, and
orthogonal decomposition against a span of previously found solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConditioningError, DimensionMismatchError, RetractionError
from .grid import GridFunction, GridSpec, require_same_grid

UNIT_NORM_TOL = 1e-12
RETRACTION_FLOOR = 1e-14
GRAM_PIVOT_FLOOR = 1e-12


class GramOperator:
    """SPD bilinear form with a cached direct factorization.

    Acts on full nodal vectors.  ``dof_mask`` selects the active degrees of
    freedom (interior nodes for homogeneous Dirichlet problems, all nodes
    otherwise); entries outside the mask are treated as constrained to zero,
    so the form is definite on the admissible subspace only.

    Solves use a cached sparse LU; beyond ``direct_limit`` unknowns the
    factorization is skipped and solves fall back to conjugate gradients at
    1e-12 relative tolerance (diagonal preconditioner).
    """

    CG_RTOL = 1e-12

    def __init__(self, matrix: sp.spmatrix, grid: GridSpec,
                 dof_mask: Optional[np.ndarray] = None,
                 direct_limit: int = 1_000_000):
        self.grid = grid
        if dof_mask is None:
            dof_mask = np.ones(grid.npoints, dtype=bool)
        self.dof_mask = dof_mask
        self.matrix = sp.csc_matrix(matrix)
        if self.matrix.shape != (int(dof_mask.sum()),) * 2:
            raise DimensionMismatchError(
                f"operator is {self.matrix.shape}, mask selects {dof_mask.sum()} dofs"
            )
        if self.matrix.shape[0] <= direct_limit:
            self._lu = spla.splu(self.matrix)
            self._precond = None
        else:
            self._lu = None
            self._precond = sp.diags(1.0 / self.matrix.diagonal())

    def apply(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros(self.grid.npoints)
        out[self.dof_mask] = self.matrix @ u[self.dof_mask]
        return out

    def solve(self, b: np.ndarray) -> np.ndarray:
        br = b[self.dof_mask]
        out = np.zeros(self.grid.npoints)
        if self._lu is not None:
            out[self.dof_mask] = self._lu.solve(br)
            return out
        x, info = spla.cg(self.matrix, br, rtol=self.CG_RTOL, atol=0.0,
                          maxiter=10 * self.matrix.shape[0], M=self._precond)
        if info != 0:
            raise RuntimeError(f"conjugate-gradient solve failed (info={info})")
        out[self.dof_mask] = x
        return out

    def inner_arrays(self, u: np.ndarray, v: np.ndarray) -> float:
        ur = u[self.dof_mask]
        vr = v[self.dof_mask]
        return float(ur @ (self.matrix @ vr))

    def norm_arrays(self, u: np.ndarray) -> float:
        return math.sqrt(max(self.inner_arrays(u, u), 0.0))


def inner(u: GridFunction, v: GridFunction, G: GramOperator) -> float:
    """Gram inner product ``u^T G v``."""
    require_same_grid(u, v, G)
    return G.inner_arrays(u.values, v.values)


def norm(u: GridFunction, G: GramOperator) -> float:
    require_same_grid(u, G)
    return G.norm_arrays(u.values)


@dataclass(frozen=True)
class UnitVector:
    """A grid function of Gram norm one, with its residual to exact unit norm."""

    function: GridFunction
    norm_residual: float

    @property
    def values(self) -> np.ndarray:
        return self.function.values

    @property
    def grid(self):
        return self.function.grid


def normalize(u: GridFunction, G: GramOperator) -> UnitVector:
    """Rescale ``u`` to unit Gram norm, renormalizing once if the first
    pass drifts beyond the unit-norm tolerance."""
    require_same_grid(u, G)
    n = G.norm_arrays(u.values)
    if n <= RETRACTION_FLOOR:
        raise RetractionError(f"cannot normalize: Gram norm {n:.3e}")
    vals = u.values / n
    n2 = G.norm_arrays(vals)
    if abs(n2 - 1.0) > UNIT_NORM_TOL:
        vals = vals / n2
        n2 = G.norm_arrays(vals)
    return UnitVector(GridFunction(vals, u.grid), abs(n2 - 1.0))


def retract(v: UnitVector, g: GridFunction, alpha: float, G: GramOperator) -> UnitVector:
    """Normalized update ``(v - alpha*g) / ||v - alpha*g||``.

    The denominator is always evaluated directly from the Gram form rather
    than through ``sqrt(1 + alpha^2 ||g||^2)``, which is exact only when g
    is orthogonal to v.
    """
    require_same_grid(v.function, g, G)
    if alpha < 0:
        raise ValueError(f"step size must be >= 0, got {alpha}")
    w = v.values - alpha * g.values
    n = G.norm_arrays(w)
    if n <= RETRACTION_FLOOR:
        raise RetractionError(f"retraction denominator {n:.3e} at alpha={alpha:.3e}")
    return normalize(GridFunction(w, v.grid), G)


def tangent_project(v: UnitVector, u: GridFunction, G: GramOperator) -> GridFunction:
    """Orthogonal projection onto the tangent space at v: ``u - (u,v) v``."""
    require_same_grid(v.function, u, G)
    c = G.inner_arrays(u.values, v.values)
    return GridFunction(u.values - c * v.values, u.grid)


class SupportSpace:
    """Ordered span of previously found solutions with cached Gram data.

    Immutable; safe to share read-only between concurrent solves.  An
    optional reference decomposition (the support-space component of the
    starting direction of a run) backs the multiplier ``tau`` reported by
    :func:`decompose_against_support`.
    """

    def __init__(self, basis: Sequence[GridFunction], G: GramOperator,
                 reference_coeffs: Optional[np.ndarray] = None):
        self.basis = tuple(basis)
        self.G = G
        for u in self.basis:
            require_same_grid(u, G)
        k = len(self.basis)
        gram = np.empty((k, k))
        images = [G.apply(u.values) for u in self.basis]
        for i in range(k):
            for j in range(i, k):
                gram[i, j] = gram[j, i] = float(self.basis[i].values @ images[j])
        self.gram = gram
        self._gram_images = images
        self._chol = self._factor(gram) if k else np.empty((0, 0))
        if reference_coeffs is not None:
            reference_coeffs = np.asarray(reference_coeffs, dtype=float)
            if reference_coeffs.shape != (k,):
                raise DimensionMismatchError(
                    f"reference has {reference_coeffs.size} coefficients, basis has {k}"
                )
        self.reference_coeffs = reference_coeffs

    @staticmethod
    def _factor(gram: np.ndarray) -> np.ndarray:
        scale = np.sqrt(np.diag(gram))
        if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
            raise ConditioningError("support basis contains a zero-norm element")
        scaled = gram / np.outer(scale, scale)
        try:
            chol = np.linalg.cholesky(scaled)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"support Gram matrix not positive-definite: {exc}")
        if float(np.min(np.diag(chol)) ** 2) <= GRAM_PIVOT_FLOOR:
            raise ConditioningError(
                "support Gram matrix is numerically singular "
                f"(scaled pivot {np.min(np.diag(chol))**2:.3e} <= {GRAM_PIVOT_FLOOR:g})"
            )
        return chol

    def __len__(self):
        return len(self.basis)

    def with_reference(self, coeffs: np.ndarray) -> "SupportSpace":
        """Copy sharing all cached data, with the run's reference attached."""
        out = SupportSpace.__new__(SupportSpace)
        out.basis = self.basis
        out.G = self.G
        out.gram = self.gram
        out._gram_images = self._gram_images
        out._chol = self._chol
        out.reference_coeffs = np.asarray(coeffs, dtype=float)
        return out

    def solve_gram(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``gram @ c = rhs`` through the scaled Cholesky factor."""
        if len(self) == 0:
            return np.empty(0)
        scale = np.sqrt(np.diag(self.gram))
        y = np.linalg.solve(self._chol, rhs / scale)
        c = np.linalg.solve(self._chol.T, y)
        return c / scale

    def projection_inner(self, u_values: np.ndarray) -> np.ndarray:
        """Vector of Gram inner products of ``u`` with each basis element."""
        return np.array([u_values @ img for img in self._gram_images])

    def combination(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros(self.G.grid.npoints)
        for c, u in zip(coeffs, self.basis):
            out += c * u.values
        return out


@dataclass(frozen=True)
class Decomposition:
    """Result of splitting a unit vector against a support space."""

    perp_norm: float
    tau: float
    coeffs: np.ndarray


def decompose_against_support(v: UnitVector, L: SupportSpace,
                              G: GramOperator) -> Decomposition:
    """Split ``v = v_perp + sum_i c_i u_i`` Gram-orthogonally.

    Returns the norm of the orthogonal component, the multiplier ``tau``
    of the reference support component (0 when no reference is attached
    or the reference component vanishes), and the expansion coefficients.
    """
    require_same_grid(v.function, G)
    if L.G is not G and L.G.grid != G.grid:
        raise DimensionMismatchError("support space bound to a different grid")
    if len(L) == 0:
        return Decomposition(norm(v.function, G), 0.0, np.empty(0))
    b = L.projection_inner(v.values)
    coeffs = L.solve_gram(b)
    # the orthogonal component is measured on the explicit residual vector,
    # which stays accurate far below the sqrt(eps) cancellation floor of the
    # Pythagoras form ||v||^2 - ||v_span||^2
    perp = G.norm_arrays(v.values - L.combination(coeffs))
    tau = 0.0
    ref = L.reference_coeffs
    if ref is not None:
        ref_sq = float(ref @ (L.gram @ ref))
        if ref_sq > GRAM_PIVOT_FLOOR:
            tau = float(coeffs @ (L.gram @ ref)) / ref_sq
    return Decomposition(perp, tau, coeffs)
