"""Abstract non-conservative balance law ``Q_t + A(Q) Q_x = S(Q, x)``.

Concrete models provide a bundle of numba-compiled point kernels
(:class:`Kernels`).  The time-stepping code in :mod:`wbgrp.solver` is
written once against that bundle, and the Python-level methods below call
the very same kernels, so there is a single arithmetic path.

Kernel signatures (``c`` is the model's constant vector, ``a`` a row of
position-dependent auxiliary data such as gravity and wall parameters)::

    matvec(Q, W, c, out)               out = A(Q) W
    source(Q, a, c, out)               out = S(Q, x)
    linear_source(c, out)              diagonal of the linear part of S
    speed(Q, c) -> float               max |eigenvalue|
    fluct(QL, QR, c, Dm, Dp, SL, SR)   -> status; fluctuations and star states
    stat_rhs(Q, a, c, out)             -> status; dQ*/dx of the stationary ODE
    stat_seed(Qbar, a, c, out)         stationary anchor template from a cell average
    stat_node(Q, a, c)                 pin prescribed components at a node
    admissible(Q, c) -> bool
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DomainError,
    PredictorError,
    RegimeError,
    RiemannSolverError,
    SingularityError,
    StepFailure,
    UsageError,
)

# Model identifiers understood by :mod:`wbgrp.dispatch`.
BURGERS = 0
BFE = 1
LINEAR = 2

# Status codes returned by compiled kernels.
OK = 0
DOMAIN = 1
SINGULAR = 2
RIEMANN = 3
REGIME = 4
PREDICTOR = 5
STEP = 6

_EXC = {
    DOMAIN: DomainError,
    SINGULAR: SingularityError,
    RIEMANN: RiemannSolverError,
    REGIME: RegimeError,
    PREDICTOR: PredictorError,
    STEP: StepFailure,
}


def raise_for_status(status: int, message: str, location=None, **info) -> None:
    """Translate a kernel status code into the matching exception."""
    if status != OK:
        raise _EXC.get(status, StepFailure)(message, location=location, **info)


class Kernels(NamedTuple):
    matvec: Callable
    source: Callable
    linear_source: Callable
    speed: Callable
    fluct: Callable
    stat_rhs: Callable
    stat_seed: Callable
    stat_node: Callable
    admissible: Callable


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``N`` cells on ``[x_A, x_B]``."""

    x_A: float
    x_B: float
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4:
            raise UsageError(f"grid needs at least 4 cells, got N={self.N}")
        if not self.x_B > self.x_A:
            raise UsageError("grid requires x_B > x_A")

    @property
    def dx(self) -> float:
        return (self.x_B - self.x_A) / self.N

    @property
    def length(self) -> float:
        return self.x_B - self.x_A

    @property
    def interfaces(self) -> np.ndarray:
        return self.fine(1)

    @property
    def centers(self) -> np.ndarray:
        return self.fine(2)[1::2]

    def fine(self, per_cell: int) -> np.ndarray:
        """Coordinates of a grid refined ``per_cell`` times inside each cell.

        All node positions used by the solver are taken from this array so
        that points shared by neighbouring cells are bitwise identical.
        """
        k = np.arange(self.N * per_cell + 1)
        return self.x_A + (self.x_B - self.x_A) * k / (self.N * per_cell)


class SystemModel:
    """Base class of a concrete balance law.

    Subclasses set ``name``, ``model_id``, ``dim``, ``naux``, ``consts``,
    ``kernels`` and ``anchor_component`` and implement :meth:`aux_at`.
    """

    name: str = "abstract"
    model_id: int = -1
    dim: int = 0
    naux: int = 0
    consts: np.ndarray
    kernels: Kernels
    anchor_component: int = 0
    component_names: tuple[str, ...] = ()

    def aux_at(self, x) -> np.ndarray:
        """Position-dependent data at ``x`` as an ``(n, naux)`` array."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.zeros((x.size, self.naux))

    # -- thin wrappers over the kernels -------------------------------------
    def _state(self, Q) -> np.ndarray:
        Q = np.array(Q, dtype=float).reshape(self.dim)
        if not self.kernels.admissible(Q, self.consts):
            raise DomainError(f"inadmissible {self.name} state {Q}")
        return Q

    def _aux1(self, x) -> np.ndarray:
        return self.aux_at(0.0 if x is None else x)[0]

    def matrix_action(self, Q, w) -> np.ndarray:
        Q = self._state(Q)
        out = np.empty(self.dim)
        self.kernels.matvec(Q, np.array(w, dtype=float).reshape(self.dim), self.consts, out)
        return out

    def matrix(self, Q) -> np.ndarray:
        """Dense ``A(Q)``; debugging aid only."""
        eye = np.eye(self.dim)
        return np.column_stack([self.matrix_action(Q, e) for e in eye])

    def source(self, Q, x=None) -> np.ndarray:
        Q = self._state(Q)
        out = np.empty(self.dim)
        self.kernels.source(Q, self._aux1(x), self.consts, out)
        return out

    def linear_source(self) -> np.ndarray:
        out = np.empty(self.dim)
        self.kernels.linear_source(self.consts, out)
        return out

    def speed(self, Q) -> float:
        return float(self.kernels.speed(self._state(Q), self.consts))

    def eigenvalues(self, Q) -> np.ndarray:
        """Ascending eigenvalues of ``A(Q)``."""
        return np.sort(np.linalg.eigvals(self.matrix(Q)).real)

    def stationary_rhs(self, x, Q) -> np.ndarray:
        Q = self._state(Q)
        out = np.empty(self.dim)
        status = self.kernels.stat_rhs(Q, self._aux1(x), self.consts, out)
        raise_for_status(status, f"stationary ODE singular at x={x}", location=x)
        return out

    def riemann(self, QL, QR):
        """Star states ``(Q*L, Q*R)`` of the interface Riemann problem."""
        QL, QR = self._state(QL), self._state(QR)
        Dm, Dp, SL, SR = (np.empty(self.dim) for _ in range(4))
        status = self.kernels.fluct(QL, QR, self.consts, Dm, Dp, SL, SR)
        raise_for_status(status, "Riemann solver failed", QL=QL, QR=QR)
        return SL, SR

    def is_admissible(self, Q) -> bool:
        Q = np.asarray(Q, dtype=float).reshape(self.dim)
        return bool(self.kernels.admissible(Q, self.consts))


def quasilinear_residual(model: SystemModel, Q, dQdx, x=None) -> np.ndarray:
    """``A(Q) dQdx - S(Q, x)``; vanishes on stationary solutions."""
    return model.matrix_action(Q, dQdx) - model.source(Q, x)


def max_wave_speed(model: SystemModel, states: Sequence) -> float:
    """Largest characteristic speed over a collection of states."""
    states = [np.asarray(s, dtype=float).reshape(model.dim) for s in states]
    if not states:
        raise UsageError("max_wave_speed needs at least one state")
    return max(model.speed(s) for s in states)
