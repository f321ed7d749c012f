"""Discretized variational problems on uniform grids.

Two problem families are provided:

* :class:`DirichletProblem` -- semilinear equations ``-lap(u) = f(x, u)``
  with homogeneous Dirichlet data, ``f(x, u) = |x|^ell |u|^(gamma-1) u``
  (``ell = 0`` gives the classic cubic autonomous case).  The Hilbert
  space is the zero-boundary subspace with the stiffness inner product.

* :class:`NeumannProblem` -- ``-lap(u) + a*u = 0`` inside a square with
  the cubic flux condition ``du/dn = u^3`` on the boundary.  The Hilbert
  space is the subspace of discretely a-harmonic functions (interior
  rows of the weighted operator vanish), on which the operator form
  equals the boundary flux pairing.

Both use a 5-point (3-point in 1D) difference Laplacian with lumped
trapezoidal mass, equivalent to lowest-order elements with mass lumping
on the right-triangle split of the grid.  Linear solves go through a
cached sparse direct factorization.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import BoundaryConditionError, DegenerateDirectionError
from .grid import GridFunction, GridSpec, require_same_grid
from .hilbert import GramOperator, UnitVector, normalize
from .regions import BoundaryData, Region, boundary_theta


class PowerNonlinearity:
    """``f(x, u) = weight(x) |u|^(gamma-1) u`` with primitive
    ``F(x, u) = weight(x) |u|^(gamma+1) / (gamma+1)``.

    Odd in u; f(x, 0) = 0.
    """

    def __init__(self, weight: np.ndarray, gamma: float = 3.0):
        if gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {gamma}")
        self.weight = np.asarray(weight, dtype=float)
        self.gamma = float(gamma)

    def value(self, u: np.ndarray) -> np.ndarray:
        if self.gamma == 3.0:
            return self.weight * u * u * u
        return self.weight * np.abs(u) ** (self.gamma - 1.0) * u

    def primitive(self, u: np.ndarray) -> np.ndarray:
        if self.gamma == 3.0:
            return self.weight * (0.25 * (u * u) ** 2)
        p = self.gamma + 1.0
        return self.weight * (np.abs(u) ** p) / p


class FixedSource:
    """u-independent load ``f(x, u) = s(x)``; oracle mode for manufactured
    right-hand sides (does not satisfy f(x, 0) = 0)."""

    def __init__(self, source: np.ndarray):
        self.source = np.asarray(source, dtype=float)

    def value(self, u: np.ndarray) -> np.ndarray:
        return self.source

    def primitive(self, u: np.ndarray) -> np.ndarray:
        return self.source * u


def _stiffness_1d(n: int, h: float) -> sp.spmatrix:
    main = np.full(n + 1, 2.0)
    main[0] = main[-1] = 1.0
    off = -np.ones(n)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h


def _lumped_mass_1d(n: int, h: float) -> np.ndarray:
    m = np.full(n + 1, h)
    m[0] = m[-1] = 0.5 * h
    return m


def _assemble_full(grid: GridSpec):
    """Natural (no-constraint) stiffness matrix and lumped mass vector."""
    ax = _stiffness_1d(grid.nx, grid.hx)
    mx = _lumped_mass_1d(grid.nx, grid.hx)
    if grid.is_1d:
        return sp.csr_matrix(ax), mx
    ay = _stiffness_1d(grid.ny, grid.hy)
    my = _lumped_mass_1d(grid.ny, grid.hy)
    stiff = sp.kron(sp.diags(my), ax) + sp.kron(ay, sp.diags(mx))
    mass = np.outer(my, mx).ravel()
    return sp.csr_matrix(stiff), mass


def _boundary_weights(grid: GridSpec) -> np.ndarray:
    """Lumped trapezoid weights of the boundary line integral (full-length
    vector, zero at interior nodes; corners collect two half edges)."""
    w = np.zeros(grid.shape)
    hx, hy = grid.hx, grid.hy
    w[0, :] += 0.5 * hx
    w[-1, :] += 0.5 * hx
    w[:, 0] += 0.5 * hy
    w[:, -1] += 0.5 * hy
    w[0, 1:-1] += 0.5 * hx
    w[-1, 1:-1] += 0.5 * hx
    w[1:-1, 0] += 0.5 * hy
    w[1:-1, -1] += 0.5 * hy
    return w.ravel()


class _ProblemBase:
    """Shared energy / pairing / gradient / residual machinery.

    Subclasses provide ``gram`` (the Gram operator realizing the space's
    inner product), ``quad_weights`` (nodal weights of the nonlinear
    integral), ``residual_mask`` (nodes carrying the strong-form residual)
    and ``nonlinearity``.
    """

    grid: GridSpec
    gram: GramOperator
    quad_weights: np.ndarray
    residual_mask: np.ndarray
    nonlinearity: object

    def validate(self, w: GridFunction) -> None:
        require_same_grid(w, self.gram)

    # array-level fast paths (no validation); used by the inner maximizer

    def _energy_arr(self, vals: np.ndarray) -> float:
        gw = self.gram.apply(vals)
        return 0.5 * float(vals @ gw) - float(
            self.quad_weights @ self.nonlinearity.primitive(vals)
        )

    def _weak_residual_arr(self, vals: np.ndarray) -> np.ndarray:
        return self.gram.apply(vals) - self.quad_weights * self.nonlinearity.value(vals)

    def _energy_and_weak_residual_arr(self, vals: np.ndarray):
        gw = self.gram.apply(vals)
        energy = 0.5 * float(vals @ gw) - float(
            self.quad_weights @ self.nonlinearity.primitive(vals)
        )
        residual = gw - self.quad_weights * self.nonlinearity.value(vals)
        return energy, residual

    # public operations

    def energy(self, w: GridFunction) -> float:
        self.validate(w)
        return self._energy_arr(w.values)

    def pairing(self, w: GridFunction, phi: GridFunction) -> float:
        """Directional derivative of the energy at w along phi."""
        self.validate(w)
        require_same_grid(w, phi)
        return float(self._weak_residual_arr(w.values) @ phi.values)

    def weak_residual(self, w: GridFunction) -> GridFunction:
        """Dual vector r with ``pairing(w, phi) = r . phi`` for all phi."""
        self.validate(w)
        return GridFunction(self._weak_residual_arr(w.values), self.grid)

    def gradient(self, w: GridFunction) -> GridFunction:
        """Riesz representer of the derivative: solves G g = r."""
        self.validate(w)
        return GridFunction(self.gram.solve(self._weak_residual_arr(w.values)),
                            self.grid)

    def residual_inf(self, w: GridFunction) -> float:
        """Max norm of the strong-form residual (weak defect over weights)."""
        self.validate(w)
        r = self._weak_residual_arr(w.values)
        m = self.residual_mask
        return float(np.max(np.abs(r[m]) / self._residual_scale[m])) if m.any() else 0.0

    def _normalized_direction(self, load: np.ndarray) -> UnitVector:
        if not np.any(load):
            raise DegenerateDirectionError("initial-direction load is identically zero")
        tilde = self.gram.solve(load)
        return normalize(GridFunction(tilde, self.grid), self.gram)


class DirichletProblem(_ProblemBase):
    """``-lap(u) = weight(x) |u|^(gamma-1) u`` with zero boundary values."""

    def __init__(self, grid: GridSpec, ell: float = 0.0, gamma: float = 3.0,
                 nonlinearity=None):
        if ell < 0:
            raise ValueError(f"ell must be >= 0, got {ell}")
        self.grid = grid
        self.ell = float(ell)
        self.gamma = float(gamma)
        stiff, mass = _assemble_full(grid)
        interior = grid.interior_mask()
        self.gram = GramOperator(stiff[interior][:, interior], grid, interior)
        qw = mass.copy()
        qw[~interior] = 0.0
        self.quad_weights = qw
        self.residual_mask = interior
        self._residual_scale = np.where(interior, mass, 1.0)
        if nonlinearity is None:
            nonlinearity = PowerNonlinearity(self._henon_weight(), gamma)
        self.nonlinearity = nonlinearity

    def _henon_weight(self) -> np.ndarray:
        if self.ell == 0.0:
            return np.ones(self.grid.npoints)
        coords = self.grid.node_coords()
        if self.grid.is_1d:
            r2 = coords * coords
        else:
            x, y = coords
            r2 = x * x + y * y
        return r2 ** (0.5 * self.ell)

    def validate(self, w: GridFunction) -> None:
        require_same_grid(w, self.gram)
        bvals = w.values[~self.residual_mask]
        scale = 1.0 + float(np.max(np.abs(w.values)))
        if np.max(np.abs(bvals), initial=0.0) > 1e-12 * scale:
            raise BoundaryConditionError(
                "nonzero boundary values on a homogeneous Dirichlet problem "
                f"(max {np.max(np.abs(bvals)):.3e})"
            )

    def with_fixed_source(self, source: np.ndarray) -> "DirichletProblem":
        """Copy of this problem whose load is the fixed nodal source."""
        out = DirichletProblem.__new__(DirichletProblem)
        out.__dict__.update(self.__dict__)
        out.nonlinearity = FixedSource(source)
        return out

    def initial_direction(self, omega1: Region, omega2: Region) -> UnitVector:
        """Normalized solution of the Poisson problem with indicator load
        ``1_{omega1} - 1_{omega2}``."""
        coords = self.grid.node_coords()
        if self.grid.is_1d:
            x1, x2 = coords, np.zeros_like(coords)
        else:
            x1, x2 = coords
        rhs = omega1.mask(x1, x2).astype(float) - omega2.mask(x1, x2).astype(float)
        return self._normalized_direction(self.quad_weights * rhs)


class NeumannProblem(_ProblemBase):
    """``-lap(u) + a*u = 0`` in a square with cubic boundary flux."""

    def __init__(self, grid: GridSpec, a: float = 1.0, gamma: float = 3.0):
        if grid.is_1d:
            raise ValueError("boundary-flux problem needs a 2D grid")
        if grid.nx != grid.ny or not np.isclose(grid.x_hi - grid.x_lo,
                                                grid.y_hi - grid.y_lo):
            raise ValueError("boundary-flux problem supports square domains only")
        if a <= 0:
            raise ValueError(f"a must be positive, got {a}")
        self.grid = grid
        self.a = float(a)
        stiff, mass = _assemble_full(grid)
        matrix = stiff + sp.diags(a * mass)
        self.gram = GramOperator(sp.csr_matrix(matrix), grid)
        bw = _boundary_weights(grid)
        self.quad_weights = bw
        self.residual_mask = bw > 0.0
        self._residual_scale = np.where(self.residual_mask, bw, 1.0)
        self.nonlinearity = PowerNonlinearity(np.ones(grid.npoints), gamma)
        self._interior = grid.interior_mask()

    def interior_defect(self, w: GridFunction) -> float:
        """How far w is from the discretely a-harmonic subspace, as the max
        interior row of the weighted operator relative to the function size."""
        self.validate(w)
        rows = self.gram.apply(w.values)[self._interior]
        scale = 1.0 + float(np.max(np.abs(w.values)))
        return float(np.max(np.abs(rows)) / scale)

    def initial_direction(self, rho0: BoundaryData) -> UnitVector:
        """Normalized a-harmonic function with boundary flux data rho0."""
        theta = boundary_theta(self.grid)
        load = np.zeros(self.grid.npoints)
        bmask = ~self._interior
        load[bmask] = self.quad_weights[bmask] * rho0(theta)
        return self._normalized_direction(load)
