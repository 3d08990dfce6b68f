"""Compiled dispatch from a model id to that model's point kernels.

The generic scheme kernels call these functions with an integer model id
instead of receiving kernels as arguments: numba cannot cache code that
passes compiled functions through several call levels.  The ``*_block``
variants loop over rows inside the dispatch, which keeps per-call overhead
(array views, reference counting) out of the innermost loops.
"""

from __future__ import annotations

from numba import njit

from . import burgers as _bu
from . import linear as _li
from .bfe import model as _bf
from .model import BFE, BURGERS


@njit(cache=True, inline="always")
def matvec_block(mid, Q, W, c, out):
    """``out[l] = A(Q[l]) W[l]`` for every row."""
    n = Q.shape[0]
    if mid == BURGERS:
        for l in range(n):
            _bu._matvec(Q[l], W[l], c, out[l])
    elif mid == BFE:
        for l in range(n):
            _bf._matvec(Q[l], W[l], c, out[l])
    else:
        for l in range(n):
            _li._lin_matvec(Q[l], W[l], c, out[l])


@njit(cache=True, inline="always")
def source_block(mid, Q, aux, P, per_cell, c, out):
    """``out[r] = S(Q[r])`` for rows ordered cell by cell, ``per_cell`` rows each.

    Row ``r`` sits at spatial node ``r % P`` of cell ``r // per_cell``;
    ``aux`` holds one row per (cell, spatial node).
    """
    n = Q.shape[0]
    if mid == BURGERS:
        for l in range(n):
            _bu._source(Q[l], aux[(l // per_cell) * P + l % P], c, out[l])
    elif mid == BFE:
        for l in range(n):
            _bf._source(Q[l], aux[(l // per_cell) * P + l % P], c, out[l])
    else:
        for l in range(n):
            _li._lin_source(Q[l], aux[(l // per_cell) * P + l % P], c, out[l])


@njit(cache=True, inline="always")
def admissible_block(mid, Q, c):
    """Index of the first inadmissible row, or -1."""
    n = Q.shape[0]
    for l in range(n):
        if mid == BURGERS:
            ok = _bu._admissible(Q[l], c)
        elif mid == BFE:
            ok = _bf._admissible(Q[l], c)
        else:
            ok = _li._lin_admissible(Q[l], c)
        if not ok:
            return l
    return -1


@njit(cache=True, inline="always")
def speed_block(mid, Q, c):
    """Largest wave speed over the rows of ``Q``."""
    nu = 0.0
    for l in range(Q.shape[0]):
        if mid == BURGERS:
            s = _bu._speed(Q[l], c)
        elif mid == BFE:
            s = _bf._speed(Q[l], c)
        else:
            s = _li._lin_speed(Q[l], c)
        if s > nu:
            nu = s
    return nu


@njit(cache=True, inline="always")
def fluct(mid, QL, QR, c, Dm, Dp, SL, SR):
    if mid == BURGERS:
        return _bu._fluct(QL, QR, c, Dm, Dp, SL, SR)
    if mid == BFE:
        return _bf._fluct(QL, QR, c, Dm, Dp, SL, SR)
    return _li._lin_fluct(QL, QR, c, Dm, Dp, SL, SR)


@njit(cache=True, inline="always")
def stat_rhs(mid, Q, a, c, out):
    if mid == BURGERS:
        return _bu._stat_rhs(Q, a, c, out)
    if mid == BFE:
        return _bf._stat_rhs(Q, a, c, out)
    return _li._lin_stat_rhs(Q, a, c, out)


@njit(cache=True, inline="always")
def stat_seed(mid, Qbar, a, c, out):
    if mid == BURGERS:
        _bu._stat_seed(Qbar, a, c, out)
    elif mid == BFE:
        _bf._stat_seed(Qbar, a, c, out)
    else:
        _li._lin_stat_seed(Qbar, a, c, out)


@njit(cache=True, inline="always")
def stat_node(mid, Q, a, c):
    if mid == BFE:
        _bf._stat_node(Q, a, c)


@njit(cache=True, inline="always")
def state_dim(mid, v):
    """Number of state components; a compile-time constant for the fixed-size models."""
    if mid == BURGERS:
        return 1
    if mid == BFE:
        return 8
    return v
