"""Path-conservative cell update.

    Q_i^{n+1} = Q_i - (dt/dx) (B_i - B*_i) - (dt/dx) (Dm_{i+1/2} + Dp_{i-1/2})
                + dt (S_i - S*_i)

with ``B`` the space-time quadrature of ``A(Q) dQ/dxi`` on the reference
element, ``S`` the averaged source, starred terms evaluated on the local
stationary solution and ``Dm``/``Dp`` the time-averaged fluctuations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import StepFailure, UsageError
from . import dispatch as dk
from .model import OK, SystemModel, raise_for_status
from .predictor import SpaceTimePolynomial, nodal_derivative
from .quadrature import check_order, lagrange_derivative_matrix, nodes, weights

# REFLECT mirrors the trace about the target value, so the Riemann star
# state (not the ghost) attains it; a bare VALUE ghost only gets half way
GHOST_COPY, GHOST_VALUE, GHOST_NEGATE, GHOST_REFLECT = 0, 1, -1, 2


@njit(cache=True)
def ghost_state(trace, mask, values, out):
    for m in range(trace.size):
        if mask[m] == GHOST_VALUE:
            out[m] = values[m]
        elif mask[m] == GHOST_NEGATE:
            out[m] = -trace[m]
        elif mask[m] == GHOST_REFLECT:
            out[m] = 2.0 * values[m] - trace[m]
        else:
            out[m] = trace[m]


@njit(cache=True)
def interface_sweep(mid, Qst, wt, maskL, valL, maskR, valR, c, Dm_bar, Dp_bar,
                    cache_m, cache_p, QL, QR, Dm, Dp, SL, SR):
    """Time-averaged fluctuations at all ``N+1`` interfaces.

    Also stores the end-of-step star states into ``cache_m``/``cache_p``.
    Returns ``(status, interface)``.
    """
    P = wt.size
    P2 = P * P
    N = Qst.shape[0] // P2
    v = dk.state_dim(mid, Qst.shape[1])
    for j in range(N + 1):
        for m in range(v):
            Dm_bar[j, m] = 0.0
            Dp_bar[j, m] = 0.0
        for b in range(P):
            if j > 0:
                for m in range(v):
                    QL[m] = Qst[(j - 1) * P2 + b * P + P - 1, m]
            if j < N:
                for m in range(v):
                    QR[m] = Qst[j * P2 + b * P, m]
            if j == 0:
                ghost_state(QR, maskL, valL, QL)
            if j == N:
                ghost_state(QL, maskR, valR, QR)
            status = dk.fluct(mid, QL, QR, c, Dm, Dp, SL, SR)
            if status != OK:
                return status, j
            for m in range(v):
                Dm_bar[j, m] += wt[b] * Dm[m]
                Dp_bar[j, m] += wt[b] * Dp[m]
            if b == P - 1:
                for m in range(v):
                    cache_m[j, m] = SL[m]
                    cache_p[j, m] = SR[m]
    return OK, -1


@njit(cache=True)
def volume_terms_all(mid, Qst, Qs, aux, D, wx, wt, c, wb, B, Bs, S, Ss, DQ, t1, DQs, t1s):
    """Reference-element quadratures of ``A(Q) dQ/dxi`` and ``S(Q)`` (and starred) per cell.

    ``Qst`` has one row per (cell, space-time node), ``Qs`` and ``aux`` one
    per (cell, spatial node); results are (N, v).  Both quadratures run the
    same arithmetic, so ``B == B*`` bitwise wherever the prediction equals
    ``Q*``.
    """
    P = wx.size
    nodal_derivative(mid, D, Qst, P, DQ)
    dk.matvec_block(mid, Qst, DQ, c, t1)
    _accumulate(mid, t1, wx, wt, P, B)
    dk.source_block(mid, Qst, aux, P, P * P, c, t1)
    _accumulate(mid, t1, wx, wt, P, S)
    if wb:
        nodal_derivative(mid, D, Qs, P, DQs)
        dk.matvec_block(mid, Qs, DQs, c, t1s)
        _accumulate(mid, t1s, wx, wt, 1, Bs)
        dk.source_block(mid, Qs, aux, P, P, c, t1s)
        _accumulate(mid, t1s, wx, wt, 1, Ss)
    else:
        Bs[:] = 0.0
        Ss[:] = 0.0


@njit(cache=True)
def _accumulate(mid, vals, wx, wt, ntime, acc):
    # rows of a cell are l = b P + a (ntime = P) or a alone (ntime = 1, time independent)
    P = wx.size
    N = acc.shape[0]
    v = dk.state_dim(mid, acc.shape[1])
    for i in range(N):
        base = i * P * ntime
        for m in range(v):
            acc[i, m] = 0.0
        for b in range(P):
            for a in range(P):
                w = wt[b] * wx[a]
                row = base + (b * P + a if ntime == P else a)
                for m in range(v):
                    acc[i, m] += w * vals[row, m]


@njit(cache=True)
def apply_update(mid, Q, B, Bs, Dm, Dp, S, Ss, dtdx, dt, out):
    """Cell update for all cells; ``Dm``/``Dp`` are per interface (N+1, v)."""
    v = dk.state_dim(mid, Q.shape[1])
    for i in range(Q.shape[0]):
        for m in range(v):
            out[i, m] = (Q[i, m] - dtdx * (B[i, m] - Bs[i, m])
                         - dtdx * (Dm[i + 1, m] + Dp[i, m]) + dt * (S[i, m] - Ss[i, m]))


@njit(cache=True)
def max_speed(mid, Qbar, cache_m, cache_p, c, mids):
    """Largest wave speed over averages, cached traces and their midpoints.

    ``mids`` is (N, v) scratch.
    """
    N, v = Qbar.shape
    for i in range(N):
        for m in range(v):
            mids[i, m] = 0.5 * (cache_p[i, m] + cache_m[i + 1, m])
    nu = dk.speed_block(mid, Qbar, c)
    nu = max(nu, dk.speed_block(mid, cache_p[:N], c))
    nu = max(nu, dk.speed_block(mid, cache_m[1:], c))
    return max(nu, dk.speed_block(mid, mids, c))


@njit(cache=True)
def step_size(nu, dx, cfl, t, t_final, dt_max):
    dt = cfl * dx / nu if nu > 0.0 else dt_max
    if dt > dt_max:
        dt = dt_max
    remaining = t_final - t
    if dt >= remaining:
        dt = remaining
    return dt


# -- Python-level API --------------------------------------------------------

@dataclass(frozen=True)
class FluctuationPair:
    """Fluctuations and Riemann star states at one interface."""

    minus: np.ndarray
    plus: np.ndarray
    star_left: np.ndarray
    star_right: np.ndarray


@dataclass(frozen=True)
class VolumeTerms:
    """``B`` and ``B*`` integrated over the cell and step, ``S``/``S*`` averaged."""

    B: np.ndarray
    B_star: np.ndarray
    S: np.ndarray
    S_star: np.ndarray


def interface_fluctuations(model: SystemModel, QL, QR) -> FluctuationPair:
    QL = model._state(QL)
    QR = model._state(QR)
    Dm, Dp, SL, SR = (np.empty(model.dim) for _ in range(4))
    status = model.kernels.fluct(QL, QR, model.consts, Dm, Dp, SL, SR)
    raise_for_status(status, "interface Riemann problem failed", QL=QL, QR=QR)
    return FluctuationPair(Dm, Dp, SL, SR)


def time_integrated_fluctuations(model: SystemModel, left: SpaceTimePolynomial,
                                 right: SpaceTimePolynomial, dt: float | None = None):
    """Time-averaged fluctuations between two neighbouring predictions.

    Returns ``(Dm_bar, Dp_bar, Q_minus, Q_plus)`` where the last two are the
    star states at ``tau = 1`` to be cached for the next reconstruction.
    """
    P = check_order(left.P)
    if right.P != P:
        raise UsageError("predictions of different order")
    wt = weights(P)
    Dm_bar = np.zeros(model.dim)
    Dp_bar = np.zeros(model.dim)
    for b in range(P):
        f = interface_fluctuations(model, left.nodal(b, P - 1), right.nodal(b, 0))
        Dm_bar += wt[b] * f.minus
        Dp_bar += wt[b] * f.plus
    return Dm_bar, Dp_bar, f.star_left, f.star_right


def volume_terms(model: SystemModel, poly: SpaceTimePolynomial, Qstar, dx: float, dt: float,
                 x_left: float = 0.0) -> VolumeTerms:
    """Non-conservative and source volume terms; ``Qstar=None`` disables the starred part."""
    P = check_order(poly.P)
    v = model.dim
    wb = Qstar is not None
    Qs = np.zeros((P, v)) if not wb else np.array(Qstar, dtype=float).reshape(P, v)
    aux_n = model.aux_at(x_left + dx * nodes(P))
    B, Bs, S, Ss = (np.empty((1, v)) for _ in range(4))
    volume_terms_all(model.model_id, np.ascontiguousarray(poly.values), Qs,
                     np.ascontiguousarray(aux_n), lagrange_derivative_matrix(nodes(P)),
                     weights(P), weights(P), model.consts, wb, B, Bs, S, Ss,
                     np.empty((P * P, v)), np.empty((P * P, v)), np.empty((P, v)), np.empty((P, v)))
    B, Bs, S, Ss = B[0], Bs[0], S[0], Ss[0]
    return VolumeTerms(dt * B, dt * Bs, S, Ss)


def update_cell(Q, B, B_star, Dm_right, Dp_left, S, S_star, dx: float, dt: float) -> np.ndarray:
    """Explicit update of one cell average (``B`` in integrated form)."""
    Q = np.asarray(Q, dtype=float)
    out = (Q - (np.asarray(B) - np.asarray(B_star)) / dx
           - (dt / dx) * (np.asarray(Dm_right) + np.asarray(Dp_left))
           + dt * (np.asarray(S) - np.asarray(S_star)))
    if not np.all(np.isfinite(out)):
        raise StepFailure("non-finite cell average after update")
    return out


def compute_dt(model: SystemModel, Qbar, cache_minus, cache_plus, dx: float, cfl: float,
               t: float = 0.0, t_final: float = np.inf, dt_max: float = np.inf) -> float:
    """``cfl dx / nu`` clipped to ``t_final``; ``dt_max`` when ``nu = 0``."""
    if not 0 < cfl <= 1:
        raise UsageError(f"CFL must lie in (0, 1], got {cfl}")
    Qbar = np.asarray(Qbar, dtype=float).reshape(-1, model.dim)
    nu = max_speed(model.model_id, Qbar,
                   np.asarray(cache_minus, float).reshape(-1, model.dim),
                   np.asarray(cache_plus, float).reshape(-1, model.dim),
                   model.consts, np.empty_like(Qbar))
    if nu == 0 and not np.isfinite(dt_max):
        raise UsageError("zero wave speed and no dt_max fallback configured")
    return float(step_size(nu, dx, cfl, t, t_final, dt_max))


def timestep(nu: float, dx: float, cfl: float, remaining: float = np.inf) -> float:
    """Plain CFL rule with clipping to the remaining time."""
    return float(step_size(float(nu), float(dx), float(cfl), 0.0, float(remaining), np.inf))


def segment_path_integral(model: SystemModel, QL, QR, n: int = 5) -> np.ndarray:
    """``∫_0^1 A(QL + s (QR - QL)) (QR - QL) ds`` by ``n``-point Gauss quadrature."""
    QL = np.asarray(QL, dtype=float)
    QR = np.asarray(QR, dtype=float)
    g, w = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (g + 1.0)
    jump = QR - QL
    return sum(0.5 * wk * model.matrix_action(QL + sk * jump, jump) for sk, wk in zip(s, w))
