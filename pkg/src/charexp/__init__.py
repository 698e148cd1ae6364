"""charexp: characteristic (Floquet) exponents of second-order linear ODEs
with two rank-three irregular singular points, computed from Stokes
multipliers assembled out of recursively generated coefficient tables, and
cross-validated by direct numerical monodromy and a truncated bilateral
recurrence residual.

All numerics run at the ambient mpmath precision; wrap calls in
``mpmath.workprec(bits)`` or use the pipeline/CLI, which manage precision
from their configuration.
"""

from .asymptotics import LateTermModel, late_coeff_prediction
from .coeffs import BTable, CoeffSeries, a_from_b, a_series, b_closed_form, b_table
from .errors import (
    AccuracyNotReachedError,
    CharexpError,
    IllConditionedSolveError,
    IncompleteTableError,
    InconsistencyError,
    InvalidParametersError,
    LambdaDegenerateError,
    PrecisionExhaustedError,
)
from .frame import EquationParams, Frame, choose_lambda, derive_frame
from .monodromy import (
    CircuitMatrix,
    FloquetResult,
    SolutionPairs,
    characteristic_exponent,
    circuit_matrix,
    multiplicative_solutions,
)
from .oracle import MonodromySample, hill_residual, monodromy_trace_ode
from .pipeline import PipelineOutput, PipelineSettings, solve
from .stokes import (
    EGrid,
    StokesSet,
    compute_stokes_set,
    e_grid,
    e_limit_estimate,
    h_coeff,
    stokes_multipliers,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyNotReachedError",
    "BTable",
    "CharexpError",
    "CircuitMatrix",
    "CoeffSeries",
    "EGrid",
    "EquationParams",
    "FloquetResult",
    "Frame",
    "IllConditionedSolveError",
    "IncompleteTableError",
    "InconsistencyError",
    "InvalidParametersError",
    "LambdaDegenerateError",
    "LateTermModel",
    "MonodromySample",
    "PipelineOutput",
    "PipelineSettings",
    "PrecisionExhaustedError",
    "SolutionPairs",
    "StokesSet",
    "a_from_b",
    "a_series",
    "b_closed_form",
    "b_table",
    "characteristic_exponent",
    "choose_lambda",
    "circuit_matrix",
    "compute_stokes_set",
    "derive_frame",
    "e_grid",
    "e_limit_estimate",
    "h_coeff",
    "hill_residual",
    "late_coeff_prediction",
    "monodromy_trace_ode",
    "multiplicative_solutions",
    "solve",
    "stokes_multipliers",
]
