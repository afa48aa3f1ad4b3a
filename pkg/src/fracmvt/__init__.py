"""Fractional integrals and Caputo derivatives on uniform meshes, mean value
witnesses, Nagumo-type uniqueness checks and a fractional Adams solver."""

from .errors import (
    ConvergenceError,
    DifferentiationError,
    DomainError,
    EvalError,
    ExprSyntaxError,
    FracError,
    MeshMismatchError,
    NoWitnessError,
    NonFiniteError,
    NumericalError,
    PreconditionError,
    SignChangeError,
    UnboundVariableError,
)
from .expr import compile_expr, differentiate, evaluate, parse, pretty, simplify
from .ivp import (
    EocRow,
    IvpProblem,
    IvpSolution,
    UniquenessReport,
    eoc_study,
    mittag_leffler_exact,
    residual_check,
    solve_abm,
    uniqueness_experiment,
)
from .mvt import Witness, differential_mvt_witness, integral_mvt_witness, simple_integral_mvt_witness
from .nagumo import (
    CounterexampleRhs,
    ExprRhs,
    NagumoReport,
    counterexample_rhs,
    nagumo_scan,
    scaled_counterexample,
    uniqueness_gap,
)
from .operators import (
    FracOrder,
    Mesh,
    SampledFunction,
    TaylorPoly,
    caputo_definition,
    caputo_smooth,
    fundamental_residual,
    rl_integral,
    sample,
    taylor_poly,
    taylor_remainder_residual,
)
from .special import gammafn, mittag_leffler

__version__ = "0.1.0"
