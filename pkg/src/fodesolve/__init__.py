"""Solver for initial-value problems of fractional-order ODEs.

The package decomposes a multi-term fractional equation into one
integer-order ODE coupled to inverse Abel-integral relations, steps the
integer part with a semi-implicit Euler scheme, and resolves the
coupling either by a direct Volterra update or by a Babenko series.
Discrete Riemann-Liouville quadratures for sampled series live in
:mod:`fodesolve.operators`.
"""

from .decompose import (
    Babenko,
    BabenkoResult,
    Classification,
    DecomposedSystem,
    DirectVolterra,
    ForcingSegment,
    FracTerm,
    PiecewiseForcing,
    Polynomial,
    PowerSumForcing,
    ProblemSpec,
    RhsLink,
    SubclassKind,
    WLink,
    babenko_invert,
    build_system,
    classify,
    integer_order,
    volterra_direct_invert,
)
from .errors import (
    BabenkoTailWarning,
    NonzeroOriginError,
    SingularInversionError,
    SingularOriginError,
    UnsupportedProblemError,
)
from .gammafn import GAMMA_MAX, gamma
from .operators import (
    OperatorOrder,
    SampleSeries,
    WeightTable,
    apply_operator,
    frac_derivative01,
    frac_derivative_general,
    frac_integral,
    weight_table,
)
from .oracle import (
    ConvergenceRow,
    ManufacturedCase,
    convergence_study,
    gl_direct_solve,
    manufacture,
    power_rule,
)
from .problemfile import ParseError, format_problem, parse_problem
from .stepper import (
    Diagnostics,
    SolverConfig,
    Trajectory,
    reconstruct_derivatives,
    reconstruct_y,
    solve,
)
from .verify import CheckResult, run_checks, run_verify

__version__ = "0.1.0"

__all__ = [
    "Babenko",
    "BabenkoResult",
    "BabenkoTailWarning",
    "CheckResult",
    "Classification",
    "ConvergenceRow",
    "DecomposedSystem",
    "Diagnostics",
    "DirectVolterra",
    "ForcingSegment",
    "FracTerm",
    "GAMMA_MAX",
    "ManufacturedCase",
    "NonzeroOriginError",
    "OperatorOrder",
    "ParseError",
    "PiecewiseForcing",
    "Polynomial",
    "PowerSumForcing",
    "ProblemSpec",
    "RhsLink",
    "SampleSeries",
    "SingularInversionError",
    "SingularOriginError",
    "SolverConfig",
    "SubclassKind",
    "Trajectory",
    "UnsupportedProblemError",
    "WLink",
    "WeightTable",
    "__version__",
    "apply_operator",
    "babenko_invert",
    "build_system",
    "classify",
    "convergence_study",
    "format_problem",
    "frac_derivative01",
    "frac_derivative_general",
    "frac_integral",
    "gamma",
    "gl_direct_solve",
    "integer_order",
    "manufacture",
    "parse_problem",
    "power_rule",
    "reconstruct_derivatives",
    "reconstruct_y",
    "run_checks",
    "run_verify",
    "solve",
    "volterra_direct_invert",
    "weight_table",
]
