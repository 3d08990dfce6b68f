"""Scalar Burgers equation with algebraic source, ``q_t + q q_x = q**2``."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import BURGERS, OK, Kernels, SystemModel


@njit(cache=True)
def godunov_state(qL, qR):
    """Exact Riemann solution of ``q_t + (q²/2)_x = 0`` on ``x/t = 0``."""
    if qL > qR:
        return qL if 0.5 * (qL + qR) >= 0.0 else qR
    if qL >= 0.0:
        return qL
    if qR <= 0.0:
        return qR
    return 0.0


@njit(cache=True, inline="always")
def _matvec(Q, W, c, out):
    out[0] = Q[0] * W[0]


@njit(cache=True, inline="always")
def _source(Q, a, c, out):
    out[0] = Q[0] * Q[0]


@njit(cache=True, inline="always")
def _linear_source(c, out):
    out[0] = 0.0


@njit(cache=True, inline="always")
def _speed(Q, c):
    return abs(Q[0])


@njit(cache=True, inline="always")
def _fluct(QL, QR, c, Dm, Dp, SL, SR):
    qL = QL[0]
    qR = QR[0]
    qg = godunov_state(qL, qR)
    fg = 0.5 * qg * qg
    Dm[0] = fg - 0.5 * qL * qL
    Dp[0] = 0.5 * qR * qR - fg
    SL[0] = qg
    SR[0] = qg
    return OK


@njit(cache=True, inline="always")
def _stat_rhs(Q, a, c, out):
    out[0] = Q[0]
    return OK


@njit(cache=True, inline="always")
def _stat_seed(Qbar, a, c, out):
    out[0] = Qbar[0]


@njit(cache=True, inline="always")
def _stat_node(Q, a, c):
    pass


@njit(cache=True, inline="always")
def _admissible(Q, c):
    return np.isfinite(Q[0])


KERNELS = Kernels(
    _matvec, _source, _linear_source, _speed, _fluct,
    _stat_rhs, _stat_seed, _stat_node, _admissible,
)


class BurgersModel(SystemModel):
    name = "burgers"
    model_id = BURGERS
    dim = 1
    naux = 0
    anchor_component = 0
    component_names = ("q",)

    def __init__(self):
        self.consts = np.zeros(1)
        self.kernels = KERNELS

    def eigenvalues(self, Q) -> np.ndarray:
        return np.array([float(np.asarray(Q).reshape(1)[0])])


def burgers_riemann(qL: float, qR: float) -> float:
    """Godunov state at the interface for the inviscid Burgers flux."""
    return float(godunov_state(float(qL), float(qR)))


def burgers_stationary_rhs(x: float, q: float) -> float:
    """``dq*/dx`` of the stationary ODE ``q q' = q²``, i.e. ``q``."""
    return float(q)


def burgers_flux(q):
    return 0.5 * np.asarray(q) ** 2


def burgers_initial_condition(x):
    """Steady state ``e^x`` plus a Gaussian bump centred at -0.5."""
    x = np.asarray(x, dtype=float)
    return np.exp(x) + 0.3 * np.exp(-200.0 * (x + 0.5) ** 2)


def burgers_exact_average(a, b):
    """Exact average of ``e^x`` over ``[a, b]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.exp(a) * np.expm1(b - a) / (b - a)


def burgers_scenario():
    """Configuration of the steady-state Burgers experiment."""
    from .harness.scenarios import builtin_scenario

    return builtin_scenario("burgers-steady")


LEFT_BOUNDARY_VALUE = math.exp(-1.0)
