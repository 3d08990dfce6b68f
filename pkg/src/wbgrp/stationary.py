"""Per-cell identification of a local stationary solution.

Within a cell of width ``dx`` the stationary ODE ``Q*' = f(x, Q*)`` is
integrated with one Runge-Kutta step per node spacing ``h = dx/(P-1)``.
The free anchor component is found by Newton so that the quadrature
average of the nodal values reproduces the cell average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import dispatch as dk
from .model import OK, SystemModel, raise_for_status
from .quadrature import check_order, fine_points_per_cell, node_fine_index, tableau, weights

NEWTON_MAX_ITER = 25
NEWTON_FD_STEP = 1e-7
NEWTON_TOL = 1e-12
# iterate further while the residual is above a few ulps of the target
_POLISH_TOL = 2.0 ** -50

# outcome flags
CONVERGED, FALLBACK_NEWTON, FALLBACK_SINGULAR = 0, 1, 2


@njit(cache=True, inline="always")
def rk_step(mid, y0, aux_f, k0, h, a, b, cidx, c, y1, K, Y):
    """One explicit RK step from ``y0``; stage ``j`` reads ``aux_f[k0 + cidx[j]]``."""
    v = y0.size
    s = b.size
    for j in range(s):
        for m in range(v):
            acc = y0[m]
            for l in range(j):
                acc += h * a[j, l] * K[l, m]
            Y[m] = acc
        status = dk.stat_rhs(mid, Y, aux_f[k0 + cidx[j]], c, K[j])
        if status != OK:
            return status
    for m in range(v):
        acc = 0.0
        for j in range(s):
            acc += b[j] * K[j, m]
        y1[m] = y0[m] + h * acc
    return OK


@njit(cache=True, inline="always")
def march_cell(mid, anchor, aux_f, h, a, b, cidx, substeps, c, nodes, K, Y):
    """Fill ``nodes`` (P, v) by marching from ``anchor`` across the cell."""
    P = nodes.shape[0]
    for m in range(anchor.size):
        nodes[0, m] = anchor[m]
    for p in range(P - 1):
        status = rk_step(mid, nodes[p], aux_f, p * substeps, h, a, b, cidx, c, nodes[p + 1], K, Y)
        if status != OK:
            return status
        dk.stat_node(mid, nodes[p + 1], aux_f[(p + 1) * substeps], c)
    return OK


@njit(cache=True, inline="always")
def _residual(mid, s, k, Qbar, anchor, aux_f, h, a, b, cidx, substeps, wq, c, nodes, K, Y):
    anchor[k] = s
    status = march_cell(mid, anchor, aux_f, h, a, b, cidx, substeps, c, nodes, K, Y)
    if status != OK:
        return status, np.nan
    acc = 0.0
    for p in range(nodes.shape[0]):
        acc += wq[p] * nodes[p, k]
    return OK, acc - Qbar[k]


@njit(cache=True, inline="always")
def match_average(mid, Qbar, aux_f, h, a, b, cidx, substeps, wq,
                  k, s0, c, nodes, anchor, K, Y):
    """Newton solve for the anchor component ``k``.

    Returns ``(flag, iterations, anchor_value)``.  On failure the nodes are
    set to a constant profile built from ``Qbar``.
    """
    P = nodes.shape[0]
    dk.stat_seed(mid, Qbar, aux_f[0], c, anchor)
    scale = abs(Qbar[k])
    if scale == 0.0:
        scale = 1e-300
    s = s0
    best_s = s0
    best_f = np.inf
    flag = FALLBACK_NEWTON
    it = 0
    last = np.nan
    while it < NEWTON_MAX_ITER:
        last = s
        status, f = _residual(mid, s, k, Qbar, anchor, aux_f, h, a, b, cidx,
                              substeps, wq, c, nodes, K, Y)
        if status != OK:
            flag = FALLBACK_SINGULAR
            break
        af = abs(f)
        if af < best_f:
            best_f = af
            best_s = s
        elif best_f <= NEWTON_TOL * scale:
            break  # residual stopped improving at roundoff level
        if af <= _POLISH_TOL * scale:
            break
        it += 1
        ds = NEWTON_FD_STEP * abs(s) if s != 0.0 else NEWTON_FD_STEP * scale
        last = s + ds
        status, f2 = _residual(mid, s + ds, k, Qbar, anchor, aux_f, h, a, b, cidx,
                               substeps, wq, c, nodes, K, Y)
        if status != OK:
            flag = FALLBACK_SINGULAR
            break
        J = (f2 - f) / ds
        if J == 0.0 or not np.isfinite(J):
            break
        s_new = s - f / J
        if s_new == s:
            break
        s = s_new
    if flag != FALLBACK_SINGULAR and best_f <= NEWTON_TOL * scale:
        flag = CONVERGED
        if last != best_s:
            _residual(mid, best_s, k, Qbar, anchor, aux_f, h, a, b, cidx,
                      substeps, wq, c, nodes, K, Y)
        return flag, it, best_s
    # constant first-order guess
    dk.stat_seed(mid, Qbar, aux_f[0], c, anchor)
    for p in range(P):
        for m in range(anchor.size):
            nodes[p, m] = anchor[m]
        dk.stat_node(mid, nodes[p], aux_f[p * substeps], c)
        nodes[p, k] = Qbar[k]
    return flag, it, Qbar[k]


@njit(cache=True)
def match_all(mid, Qbar, aux_fine, h, a, b, cidx, substeps, wq, k, anchors, c, Qs,
              anchor, K, Y, newton_cells, fallback_cells):
    """Stationary identification in every cell, warm-started from ``anchors``.

    Updates ``anchors``, ``Qs`` (N, P, v) and the per-cell counters and
    returns the step totals ``(newton iterations, fallbacks)``.
    """
    N = Qbar.shape[0]
    F = (wq.size - 1) * substeps
    newton = 0
    fallbacks = 0
    for i in range(N):
        flag, it, s = match_average(mid, Qbar[i], aux_fine[i * F:i * F + F + 1], h,
                                    a, b, cidx, substeps, wq, k, anchors[i], c, Qs[i],
                                    anchor, K, Y)
        anchors[i] = s
        newton += it
        newton_cells[i] += it
        if flag != CONVERGED:
            fallbacks += 1
            fallback_cells[i] += 1
    return newton, fallbacks


@dataclass(frozen=True)
class StationaryProfile:
    """Nodal values of a local stationary solution inside one cell."""

    x: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    anchor: float
    iterations: int
    flag: int

    @property
    def converged(self) -> bool:
        return self.flag == CONVERGED

    @property
    def average(self) -> np.ndarray:
        return self.weights @ self.nodes


def _tab_arrays(P: int):
    tab = tableau(P)
    return tab.a, tab.b, tab.cidx, tab.substeps


def rk_march(model: SystemModel, x0: float, Q0, h: float, P: int) -> np.ndarray:
    """Advance the stationary ODE by one RK step (Heun for P=2, Kutta-3 for P=3)."""
    check_order(P)
    a, b, cidx, sub = _tab_arrays(P)
    aux_f = model.aux_at(x0 + h * np.arange(sub + 1) / sub)
    y0 = np.array(Q0, dtype=float).reshape(model.dim)
    y1 = np.empty_like(y0)
    status = rk_step(model.model_id, y0, aux_f, 0, float(h), a, b, cidx, model.consts,
                     y1, np.empty((b.size, model.dim)), np.empty(model.dim))
    raise_for_status(status, f"stationary ODE singular on [{x0}, {x0 + h}]", location=x0)
    return y1


def match_cell_average(model: SystemModel, cell: tuple[float, float], Qbar, P: int,
                       warm_start: float | None = None) -> StationaryProfile:
    """Stationary profile in ``cell = (x_left, dx)`` whose quadrature mean matches ``Qbar``."""
    check_order(P)
    x_left, dx = map(float, cell)
    a, b, cidx, sub = _tab_arrays(P)
    F = fine_points_per_cell(P)
    aux_f = model.aux_at(x_left + dx * np.arange(F + 1) / F)
    Qbar = np.array(Qbar, dtype=float).reshape(model.dim)
    k = model.anchor_component
    nodes = np.empty((P, model.dim))
    flag, it, s = match_average(
        model.model_id, Qbar, aux_f,
        dx / (P - 1), a, b, cidx, sub, weights(P), k,
        Qbar[k] if warm_start is None else float(warm_start), model.consts, nodes,
        np.empty(model.dim), np.empty((b.size, model.dim)), np.empty(model.dim),
    )
    x = x_left + dx * node_fine_index(P) / F
    return StationaryProfile(x, nodes, weights(P), float(s), int(it), int(flag))


def march_chain(model: SystemModel, x_fine: np.ndarray, Q0, P: int) -> np.ndarray:
    """March the stationary ODE across consecutive cells.

    ``x_fine`` is the solver's fine grid (``fine_points_per_cell(P)``
    sub-intervals per cell).  Returns the nodal states at every cell node,
    shape ``(N, P, v)``; shared interface nodes are identical.
    """
    check_order(P)
    a, b, cidx, sub = _tab_arrays(P)
    F = fine_points_per_cell(P)
    N = (x_fine.size - 1) // F
    aux = model.aux_at(x_fine)
    out = np.empty((N, P, model.dim))
    anchor = np.array(Q0, dtype=float).reshape(model.dim)
    K = np.empty((b.size, model.dim))
    Y = np.empty(model.dim)
    # same rounding as the solver's h = dx / (P - 1)
    h = (x_fine[-1] - x_fine[0]) / N / (P - 1)
    for i in range(N):
        status = march_cell(model.model_id, anchor,
                            aux[i * F:(i + 1) * F + 1], h, a, b, cidx, sub, model.consts,
                            out[i], K, Y)
        raise_for_status(status, f"stationary ODE singular in cell {i}", location=i)
        anchor = out[i, -1].copy()
    return out
