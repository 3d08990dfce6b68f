"""Scenario configs, run orchestration and the command-line interface."""

from .config import BUILTIN, ScenarioConfig, load_config, parse_config
from .norms import ErrorReport, error_norms, norms_consistent, orders
from .runner import DriftReport, RunResult, bench, converge, hydrostatic_residual, run, wb_check
from .scenarios import Setup, build, builtin_scenario, numerical_steady_state

__all__ = [
    "BUILTIN", "DriftReport", "ErrorReport", "RunResult", "ScenarioConfig", "Setup", "bench",
    "build", "builtin_scenario", "converge", "error_norms", "hydrostatic_residual", "load_config",
    "norms_consistent", "orders", "parse_config", "run", "wb_check", "numerical_steady_state",
]
