"""Mollification regularization for backward (fractional) heat conduction on R^2."""

from .errors import (
    DimensionError,
    DomainError,
    InvalidFieldError,
    MolregError,
    NoiseDominatedError,
    NonConvergenceError,
)
from .experiments import (
    AprioriParams,
    MCSummary,
    MorozovParams,
    RateCurve,
    RunRecord,
    emit_csv,
    read_csv,
    run_monte_carlo,
    run_once,
    run_rate_study,
)
from .fieldio import read_field, write_field
from .forward import Conductivity, DiffusionSymbol, apply_forward, build_symbol, truncated_operator
from .grid import Grid2D, RealField, SpectralField, forward_ft, inverse_ft, l2_norm
from .mollifier import MollifierSymbol, gaussian, penalty_symbol, phi_hat
from .noise import NoiseSpec, add_noise
from .problems import ProblemSpec, exact_pair, get_problem
from .regularizer import (
    FilterSpec,
    SelectionResult,
    discrepancy,
    reconstruct,
    select_beta_apriori,
    select_beta_morozov,
)

__version__ = "0.1.0"

__all__ = [
    "add_noise",
    "apply_forward",
    "AprioriParams",
    "build_symbol",
    "Conductivity",
    "DiffusionSymbol",
    "DimensionError",
    "discrepancy",
    "DomainError",
    "emit_csv",
    "exact_pair",
    "FilterSpec",
    "forward_ft",
    "gaussian",
    "get_problem",
    "Grid2D",
    "InvalidFieldError",
    "inverse_ft",
    "l2_norm",
    "MCSummary",
    "MollifierSymbol",
    "MolregError",
    "MorozovParams",
    "NoiseDominatedError",
    "NoiseSpec",
    "NonConvergenceError",
    "penalty_symbol",
    "phi_hat",
    "ProblemSpec",
    "RateCurve",
    "read_csv",
    "read_field",
    "RealField",
    "reconstruct",
    "run_monte_carlo",
    "run_once",
    "run_rate_study",
    "RunRecord",
    "select_beta_apriori",
    "select_beta_morozov",
    "SelectionResult",
    "SpectralField",
    "truncated_operator",
    "write_field",
]
