"""
Minimum Frobenius norm (MFN) quadratic interpolation, its Lagrange
polynomials, and the constant of well-poisedness over lp balls.

The public API is re-exported here; see the submodules for details.
"""
__version__ = "0.1.0"

from .core import (
    INF,
    DimensionError,
    InterpolationSet,
    LpBall,
    QuadraticModel,
    evaluate_model,
    hessian_frobenius_norm,
    lp_norm,
)
from .powell import powell_initial_set
from .interpolation import (
    CONDITION_THRESHOLD,
    KktSystem,
    NotPoisedError,
    ResidualError,
    UnderdeterminedError,
    assemble_kkt,
    interpolate_many,
    interpolate_mfn,
    interpolate_sym_broyden,
    is_poised,
)
from .lagrange import lagrange_polynomials_numeric, powell_lagrange_all, powell_lagrange_closed_form
from .ballmax import (
    AbsBallMax,
    BallMax,
    max_abs_quadratic_over_ball,
    max_lq_norm_numeric,
    max_lq_norm_over_lp_ball,
    max_quadratic_over_ball,
)
from .poisedness import (
    PoisednessReport,
    lambda_p_bounds,
    lambda_p_closed,
    lambda_row,
    optimality_applies,
    optimality_gap,
    optimality_threshold,
    poisedness_constant_numeric,
    powell_poisedness,
    random_poised_set,
    sweep_lambda_vs_m,
    verify_grid,
)
from .testfuncs import get_function
from .solver import SolverOptions, SolveResult, geometry_improvement_point, history_to_csv, solve
