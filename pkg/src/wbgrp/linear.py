"""Constant-coefficient linear system, a sanity model for the scheme."""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import UsageError
from .model import LINEAR, OK, Kernels, SystemModel


@njit(cache=True)
def _lin_dim(c):
    return int(c[0])


@njit(cache=True)
def _lin_block(c, k, i, j):
    v = int(c[0])
    return c[1 + k * v * v + i * v + j]


@njit(cache=True, inline="always")
def _lin_matvec(Q, W, c, out):
    v = _lin_dim(c)
    for i in range(v):
        s = 0.0
        for j in range(v):
            s += _lin_block(c, 0, i, j) * W[j]
        out[i] = s


@njit(cache=True, inline="always")
def _lin_source(Q, a, c, out):
    v = _lin_dim(c)
    for i in range(v):
        s = 0.0
        for j in range(v):
            s += _lin_block(c, 1, i, j) * Q[j]
        out[i] = s


@njit(cache=True, inline="always")
def _lin_linear_source(c, out):
    for i in range(out.size):
        out[i] = 0.0


@njit(cache=True, inline="always")
def _lin_speed(Q, c):
    return c[1 + 5 * _lin_dim(c) ** 2]


@njit(cache=True, inline="always")
def _lin_fluct(QL, QR, c, Dm, Dp, SL, SR):
    v = _lin_dim(c)
    for i in range(v):
        sm = 0.0
        sp = 0.0
        for j in range(v):
            d = QR[j] - QL[j]
            sm += _lin_block(c, 2, i, j) * d
            sp += _lin_block(c, 3, i, j) * d
        Dm[i] = sm
        Dp[i] = sp
    # star state on the t-axis: QL + (sum of left-going waves)
    for i in range(v):
        SL[i] = QL[i]
        for j in range(v):
            SL[i] += _lin_block(c, 4, i, j) * (QR[j] - QL[j])
        SR[i] = SL[i]
    return OK


@njit(cache=True, inline="always")
def _lin_stat_rhs(Q, a, c, out):
    v = _lin_dim(c)
    k = 5 * v * v + 2
    for i in range(v):
        s = 0.0
        for j in range(v):
            s += c[k + i * v + j] * Q[j]
        out[i] = s
    return OK


@njit(cache=True, inline="always")
def _lin_stat_seed(Qbar, a, c, out):
    for i in range(out.size):
        out[i] = Qbar[i]


@njit(cache=True, inline="always")
def _lin_stat_node(Q, a, c):
    pass


@njit(cache=True, inline="always")
def _lin_admissible(Q, c):
    for i in range(Q.size):
        if not np.isfinite(Q[i]):
            return False
    return True


LINEAR_KERNELS = Kernels(
    _lin_matvec, _lin_source, _lin_linear_source, _lin_speed, _lin_fluct,
    _lin_stat_rhs, _lin_stat_seed, _lin_stat_node, _lin_admissible,
)


class LinearSystem(SystemModel):
    """``Q_t + A Q_x = S Q`` with constant, diagonalisable ``A``.

    Interfaces use the exact (Roe) splitting ``D± = A± ΔQ``.  The stationary
    ODE ``Q' = A⁻¹ S Q`` requires ``A`` to be invertible; otherwise
    stationary identification is unavailable and the model is only useful
    with well-balancing switched off.
    """

    name = "linear"
    model_id = LINEAR

    def __init__(self, A, S=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        v = A.shape[0]
        S = np.zeros((v, v)) if S is None else np.atleast_2d(np.asarray(S, dtype=float))
        lam, R = np.linalg.eig(A)
        if np.abs(lam.imag).max() > 0:
            raise UsageError("linear model requires real eigenvalues")
        lam, R = lam.real, R.real
        Rinv = np.linalg.inv(R)
        Am = R @ np.diag(np.minimum(lam, 0.0)) @ Rinv
        Ap = R @ np.diag(np.maximum(lam, 0.0)) @ Rinv
        # left-going projector: waves with negative speed cross to the left
        Pm = R @ np.diag((lam < 0).astype(float)) @ Rinv
        try:
            stat = np.linalg.solve(A, S)
        except np.linalg.LinAlgError:
            stat = np.full((v, v), np.nan)
        self.dim = v
        self.A = A
        self.S = S
        self.component_names = tuple(f"q{i}" for i in range(v))
        self.consts = np.concatenate(
            [[v], A.ravel(), S.ravel(), Am.ravel(), Ap.ravel(), Pm.ravel(),
             [np.abs(lam).max()], stat.ravel()]
        ).astype(float)
        self.kernels = LINEAR_KERNELS

    def eigenvalues(self, Q=None) -> np.ndarray:
        return np.sort(np.linalg.eigvals(self.A).real)
