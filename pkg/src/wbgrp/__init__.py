"""High-order well-balanced path-conservative finite volumes in one dimension."""

from .burgers import BurgersModel, burgers_riemann, burgers_scenario, burgers_stationary_rhs
from .errors import (
    ConfigError,
    DomainError,
    PredictorError,
    RegimeError,
    RiemannSolverError,
    SingularityError,
    SolverFailure,
    StepFailure,
    UsageError,
    WBGRPError,
)
from .linear import LinearSystem
from .model import Grid, SystemModel, max_wave_speed, quasilinear_residual
from .predictor import (
    ReferenceElementMatrices,
    SpaceTimePolynomial,
    evaluate_prediction,
    predictor_fixed_point,
)
from .reconstruction import bootstrap_initial_cache, reconstruct_linear, reconstruct_quadratic
from .solver import BoundaryGhost, Solver, SolverState, StepReport
from .stationary import StationaryProfile, match_cell_average, rk_march
from .update import (
    FluctuationPair,
    VolumeTerms,
    compute_dt,
    interface_fluctuations,
    segment_path_integral,
    time_integrated_fluctuations,
    update_cell,
    volume_terms,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryGhost", "BurgersModel", "ConfigError", "DomainError", "FluctuationPair", "Grid",
    "LinearSystem", "PredictorError", "ReferenceElementMatrices", "RegimeError",
    "RiemannSolverError", "SingularityError", "Solver", "SolverFailure", "SolverState",
    "SpaceTimePolynomial", "StationaryProfile", "StepFailure", "StepReport", "SystemModel",
    "UsageError", "VolumeTerms", "WBGRPError", "bootstrap_initial_cache", "burgers_riemann",
    "burgers_scenario", "burgers_stationary_rhs", "compute_dt", "evaluate_prediction",
    "interface_fluctuations", "match_cell_average", "max_wave_speed", "predictor_fixed_point",
    "quasilinear_residual", "reconstruct_linear", "reconstruct_quadratic", "rk_march",
    "segment_path_integral", "time_integrated_fluctuations", "update_cell", "volume_terms",
]
