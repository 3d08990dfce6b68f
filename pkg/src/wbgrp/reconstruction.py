"""Compact reconstruction from the cell average and last step's interface states.

The polynomial of cell ``i`` uses only ``Qbar_i`` and the two Riemann
states adjacent to the cell that were produced at the end of the previous
step, so no neighbour averages are needed.  Local coordinate: ``xi`` runs
from 0 at the left interface to ``dx`` at the right one.  No limiter.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .model import SystemModel
from .quadrature import check_order


@njit(cache=True, inline="always")
def reconstruct_into(Qbar, QL_prev, QR_prev, out):
    """Nodal values at the P = ``out.shape[0]`` endpoint/midpoint nodes."""
    P = out.shape[0]
    for m in range(Qbar.size):
        l = QL_prev[m]
        r = QR_prev[m]
        q = Qbar[m]
        if P == 2:
            half = 0.5 * (r - l)
            out[0, m] = q - half
            out[1, m] = q + half
        else:
            out[0, m] = l
            out[1, m] = 0.25 * (6.0 * q - l - r)
            out[2, m] = r


@njit(cache=True)
def reconstruct_all(Qbar, cache_p, cache_m, W):
    """``reconstruct_into`` for every cell; ``W`` is (N, P, v)."""
    for i in range(Qbar.shape[0]):
        reconstruct_into(Qbar[i], cache_p[i], cache_m[i + 1], W[i])


def reconstruct_linear(Qbar, QL_prev, QR_prev) -> np.ndarray:
    """Values at ``{0, dx}``: ``Qbar -/+ (QR_prev - QL_prev)/2``.

    Returns an array of shape ``(2,) + shape(Qbar)``.
    """
    Qbar = np.atleast_1d(np.asarray(Qbar, dtype=float))
    out = np.empty((2, Qbar.size))
    reconstruct_into(Qbar.ravel(), np.atleast_1d(np.asarray(QL_prev, float)).ravel(),
                     np.atleast_1d(np.asarray(QR_prev, float)).ravel(), out)
    return out.reshape((2,) + Qbar.shape)


def quadratic_coefficients(Qbar, QL_prev, QR_prev, dx: float):
    """``(a, b, c)`` of ``w(xi) = a + b xi + c xi²`` on ``[0, dx]``."""
    Qbar, l, r = (np.asarray(v, dtype=float) for v in (Qbar, QL_prev, QR_prev))
    a = l
    b = (2.0 / dx) * (-2.0 * l - r + 3.0 * Qbar)
    c = (3.0 / dx**2) * (l + r - 2.0 * Qbar)
    return a, b, c


def reconstruct_quadratic(Qbar, QL_prev, QR_prev, dx: float) -> np.ndarray:
    """Values of the mean-preserving quadratic at ``{0, dx/2, dx}``.

    The endpoint values are the cached traces and the midpoint value is
    ``(6 Qbar - QL_prev - QR_prev)/4``, which is the quadratic evaluated
    in closed form.  ``dx`` only fixes the coordinate scaling, which
    cancels at the nodes.
    """
    if not dx > 0:
        raise ValueError("dx must be positive")
    Qbar = np.atleast_1d(np.asarray(Qbar, dtype=float))
    out = np.empty((3, Qbar.size))
    reconstruct_into(Qbar.ravel(), np.atleast_1d(np.asarray(QL_prev, float)).ravel(),
                     np.atleast_1d(np.asarray(QR_prev, float)).ravel(), out)
    return out.reshape((3,) + Qbar.shape)


def reconstruct(Qbar, QL_prev, QR_prev, dx: float, P: int) -> np.ndarray:
    check_order(P)
    if P == 2:
        return reconstruct_linear(Qbar, QL_prev, QR_prev)
    return reconstruct_quadratic(Qbar, QL_prev, QR_prev, dx)


def bootstrap_initial_cache(initial, grid, model: SystemModel | None = None):
    """Interface traces of the initial condition, ``(Q_minus, Q_plus)``.

    ``initial`` is either a callable ``x -> states`` (continuous data, both
    traces equal) or a pair of callables giving the left and right limits.
    Both returned arrays have shape ``(N+1, v)``; ``Q_minus[j]`` is the
    state on the left of interface ``j`` and ``Q_plus[j]`` the one on its
    right.
    """
    x = grid.interfaces
    if callable(initial):
        left = right = initial
    else:
        left, right = initial
    Qm = np.asarray(left(x), dtype=float).reshape(x.size, -1)
    Qp = Qm.copy() if right is left else np.asarray(right(x), dtype=float).reshape(x.size, -1)
    if model is not None:
        for Q in (*Qm, *Qp):
            model._state(Q)
    return Qm, Qp
