import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import saddle

settings.register_profile(
    "numeric", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


def make_dirichlet(n=16, ell=0.0, bounds=(-1.0, 1.0, -1.0, 1.0)):
    grid = saddle.GridSpec.rectangle(*bounds, n)
    return saddle.DirichletProblem(grid, ell=ell)


def make_interval(n=64, lo=0.0, hi=1.0, ell=0.0):
    return saddle.DirichletProblem(saddle.GridSpec.interval(lo, hi, n), ell=ell)


def random_admissible(problem, rng, scale=1.0):
    """Random grid function in the problem's admissible space."""
    vals = scale * rng.standard_normal(problem.grid.npoints)
    if isinstance(problem, saddle.DirichletProblem):
        vals[~problem.grid.interior_mask()] = 0.0
    else:
        # pull into the a-harmonic subspace: solve with the boundary load
        load = np.zeros_like(vals)
        bmask = problem.grid.boundary_mask()
        load[bmask] = vals[bmask]
        vals = problem.gram.solve(load)
    return saddle.GridFunction(vals, problem.grid)


def solve_ground_state(problem, rule="zh", trial="bb1", **kw):
    v0 = problem.initial_direction(saddle.parse_region("all"),
                                   saddle.parse_region("empty"))
    cfg = saddle.SolverConfig(rule=rule, trial=trial, **kw)
    return saddle.lmm_solve(problem, saddle.SupportSpace([], problem.gram), v0, cfg)


@pytest.fixture
def rng():
    # fresh per test: draws must not depend on which tests ran before
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def dirichlet16():
    return make_dirichlet(16)


@pytest.fixture(scope="session")
def neumann16():
    return saddle.NeumannProblem(saddle.GridSpec.rectangle(-1, 1, -1, 1, 16))


@pytest.fixture(scope="session")
def ground_state_24():
    """Converged positive solution on a coarse grid, reused as support."""
    problem = make_dirichlet(24)
    result = solve_ground_state(problem)
    assert result.converged
    return problem, result
