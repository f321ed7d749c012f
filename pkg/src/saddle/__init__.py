"""Local minimax solver for multiple unstable saddle points.

Computes critical points of Morse index >= 1 for discretized variational
problems: inner peak maximization over a support space of previously
found solutions, outer normalized gradient descent on the unit sphere
with monotone (exact, Armijo) or nonmonotone (ZH, GLL) step-size rules,
accelerated by safeguarded Barzilai-Borwein trial steps.
"""

from .bb import BBHistory, bb_trial, pbb_trial, trial_step
from .errors import (BoundaryConditionError, ConditioningError, ConfigError,
                     DegenerateDirectionError, DimensionMismatchError,
                     GridFileError, InitialDirectionError, PeakSelectionError,
                     RetractionError, SaddleError, StepSearchError)
from .grid import GridFunction, GridSpec, read_solution, write_solution
from .hilbert import (Decomposition, GramOperator, SupportSpace, UnitVector,
                      decompose_against_support, inner, norm, normalize,
                      retract, tangent_project)
from .peak import PeakPoint, peak_select, ray_maximizer_power
from .problems import (DirichletProblem, FixedSource, NeumannProblem,
                       PowerNonlinearity)
from .regions import BoundaryData, Region, boundary_theta, parse_region
from .rules import (ArmijoState, ExactState, GLLState, ZHState,
                    advance_rule_state, backtracking_search, exact_search,
                    make_rule_state, reference_value, update_zh_state)
from .solver import (SolveResult, SolverConfig, SolverTrace, TraceRecord,
                     lmm_solve)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
