"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class WBGRPError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(WBGRPError):
    """Invalid scenario configuration or fixture data."""


class UsageError(WBGRPError, ValueError):
    """A function was called with arguments outside its contract."""


class SolverFailure(WBGRPError):
    """Base class for failures during time integration."""

    def __init__(self, message: str, *, location: float | int | None = None, **info):
        super().__init__(message)
        self.location = location
        self.info = info


class DomainError(SolverFailure):
    """An inadmissible state was encountered (e.g. non-positive area)."""


class SingularityError(SolverFailure):
    """The stationary ODE hit a sonic point."""


class RiemannSolverError(SolverFailure):
    """The iterative Riemann solver did not converge."""


class RegimeError(SolverFailure):
    """Supercritical star region in the blood-flow Riemann problem."""


class PredictorError(SolverFailure):
    """The space-time predictor produced an inadmissible nodal state."""


class StepFailure(SolverFailure):
    """The cell update produced an inadmissible state."""
