"""Periodic solutions of a 1-D phase-field system with play-type hysteresis.

The temperature u obeys a heat equation with a bounded source; the order
parameter v obeys a diffusive equation constrained to the band
[lower(u), upper(u)] through the (regularized) normal cone of the band's
indicator.  The package discretizes the regularized system with a
splitting-faithful IMEX scheme, computes time-periodic solutions by
fixed-point iteration, and verifies the structural inequalities and uniform
estimates of the model numerically.
"""

from .curves import CurvePair, Mollifier, coincident, eval_pair, from_expressions, mollified_pair, mollify, truncated_play
from .diagnostics import (
    ConstraintReport,
    NormBundle,
    constraint_violation,
    defect_field_check,
    energy_inequality_check,
    norm_bundle,
    vi_residual,
)
from .dynamics import InstabilityError, ModelConfig, SystemState, Trajectory, integrate, step
from .exprlang import EvalError, Expr, ExprSyntaxError, estimate_lipschitz, evaluate, parse, to_string
from .hysteresis import DefectPair, SubdiffBranch, monotonicity_defect, project, subdiff_branch, yosida, yosida_energy
from .periodic import (
    NotConvergedError,
    PeriodicForcing,
    PeriodicReport,
    find_periodic,
    linear_periodic_solve,
    period_map,
    outer_fixed_point,
    state_distance,
)
from .spatial import Field, Grid1D, dirichlet_eigenvalue, dirichlet_eigenvector, laplacian, norms, poincare_constant, solve_helmholtz

__version__ = "0.1.0"
