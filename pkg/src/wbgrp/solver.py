"""Time integration loop.

One step consists of: CFL time step, per-cell stationary identification,
reconstruction and space-time prediction, interface fluctuations (which
also refresh the trace cache), then the cell update.  The loop runs inside
a single compiled function; Python only sets up arrays and translates
status codes into exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DomainError, PredictorError, StepFailure, UsageError
from . import dispatch as dk
from .model import BFE, BURGERS, DOMAIN, LINEAR, OK, PREDICTOR, STEP, Grid, SystemModel, raise_for_status
from .predictor import ReferenceElementMatrices, build_operators, predict, stationary_terms
from .quadrature import check_order, fine_points_per_cell, tableau, weights
from .reconstruction import reconstruct_all
from .stationary import match_all
from .update import apply_update, interface_sweep, max_speed, step_size, volume_terms_all

# history columns
H_T, H_DT, H_NU, H_NEWTON, H_FALLBACK, H_DEV, H_RETRY = range(7)
NHIST = 7


# predictions are redone with a smaller step at most this many times, and only
# when predicted speeds exceed the step's speed bound by more than roundoff
MAX_DT_RETRIES = 8
DT_RETRY_TOL = 1e-10


@njit(cache=True)
def advance(mid, state, run, data, bc, ops, hist):
    """Advance up to ``max_steps`` steps or until ``t_final``.

    Arguments are grouped into tuples, see :meth:`Solver.advance`.  Returns
    ``(status, where, at_interface, steps, t)``; on failure ``where`` is the
    offending interface if ``at_interface`` is set, else the cell.
    """
    Qbar, cache_m, cache_p, anchors, newton_cells, fallback_cells = state
    t, t_final, max_steps, dx, cfl, dt_max, wb = run
    aux_fine, aux_nodes, c, anchor_k = data
    maskL, valL, maskR, valR = bc
    K1, F0, M, lam, D, wq, ta, tb, tc, substeps = ops
    N, v = Qbar.shape
    P = wq.size
    P2 = P * P
    h = dx / (P - 1)
    NP = N * P
    NP2 = N * P2
    aux2 = aux_nodes.reshape((NP, aux_nodes.shape[2]))
    # work arrays: one row per (cell, node); the 3D views serve the per-cell kernels
    Qs = np.zeros((NP, v))
    W = np.empty((NP, v))
    Qs3 = Qs.reshape((N, P, v))
    W3 = W.reshape((N, P, v))
    Qst = np.empty((NP2, v))
    G = np.empty((v, P2, P))
    H = np.empty((v, P2, P2))
    AdQs = np.zeros((NP, v))
    Ss = np.zeros((NP, v))
    d0 = np.empty((NP, v))
    DQs = np.empty((NP, v))
    t1s = np.empty((NP, v))
    d = np.empty((NP2, v))
    r = np.empty((NP2, v))
    DQ = np.empty((NP2, v))
    t1 = np.empty((NP2, v))
    t2 = np.empty((NP2, v))
    Dm_bar = np.empty((N + 1, v))
    Dp_bar = np.empty((N + 1, v))
    new_m = np.empty_like(cache_m)
    new_p = np.empty_like(cache_p)
    Qnew = np.empty_like(Qbar)
    B = np.empty((N, v))
    Bs = np.empty((N, v))
    S = np.empty((N, v))
    Sv = np.empty((N, v))
    anchor = np.empty(v)
    Kst = np.empty((tb.size, v))
    Yst = np.empty(v)
    QL = np.empty(v)
    QR = np.empty(v)
    Dm = np.empty(v)
    Dp = np.empty(v)
    SL = np.empty(v)
    SR = np.empty(v)
    steps = 0
    while steps < max_steps and t < t_final:
        nu = max_speed(mid, Qbar, cache_m, cache_p, c, Qnew)
        dt = step_size(nu, dx, cfl, t, t_final, dt_max)
        if not dt > 0.0:
            return STEP, -1, False, steps, t
        if wb:
            newton, fallbacks = match_all(mid, Qbar, aux_fine, h, ta, tb, tc, substeps, wq,
                                          anchor_k, anchors, c, Qs3, anchor, Kst, Yst,
                                          newton_cells, fallback_cells)
        else:
            newton, fallbacks = 0, 0
        reconstruct_all(Qbar, cache_p, cache_m, W3)
        bad = dk.admissible_block(mid, W, c)
        if bad >= 0:
            return DOMAIN, bad // P, False, steps, t
        if wb:
            stationary_terms(mid, Qs, aux2, lam, D, c, AdQs, Ss, DQs)
        # predicted states faster than nu shrink the step (then predict again)
        retries = 0
        for attempt in range(MAX_DT_RETRIES + 1):
            build_operators(K1, F0, M, lam, dt, G, H)
            status, i = predict(mid, W, Qs, aux2, lam, dt, dt / dx, D, G, H, c,
                                Qst, AdQs, Ss, d0, d, r, DQ, t1, t2)
            if status != OK:
                return PREDICTOR, i, False, steps, t
            nu_pred = dk.speed_block(mid, Qst, c)
            if nu_pred <= nu * (1.0 + DT_RETRY_TOL) or attempt == MAX_DT_RETRIES:
                break
            nu = nu_pred
            dt_new = step_size(nu, dx, cfl, t, t_final, dt_max)
            if dt_new >= dt:
                break
            dt = dt_new
            retries += 1
        dtdx = dt / dx
        maxdev = 0.0
        if wb:
            for k in range(NP2):
                ks = (k // P2) * P + k % P
                for m in range(v):
                    dev = abs(Qst[k, m] - Qs[ks, m])
                    if dev > maxdev:
                        maxdev = dev
        status, j = interface_sweep(mid, Qst, wq, maskL, valL, maskR, valR, c, Dm_bar, Dp_bar,
                                    new_m, new_p, QL, QR, Dm, Dp, SL, SR)
        if status != OK:
            return status, j, True, steps, t
        volume_terms_all(mid, Qst, Qs, aux2, D, wq, wq, c, wb, B, Bs, S, Sv,
                         DQ, t1, DQs, t1s)
        apply_update(mid, Qbar, B, Bs, Dm_bar, Dp_bar, S, Sv, dtdx, dt, Qnew)
        bad = dk.admissible_block(mid, Qnew, c)
        if bad >= 0:
            return STEP, bad, False, steps, t
        Qbar[:] = Qnew
        cache_m[:] = new_m
        cache_p[:] = new_p
        if dt == t_final - t:
            t = t_final
        else:
            t += dt
        if steps < hist.shape[0]:
            hist[steps, H_T] = t
            hist[steps, H_DT] = dt
            hist[steps, H_NU] = nu
            hist[steps, H_NEWTON] = newton
            hist[steps, H_FALLBACK] = fallbacks
            hist[steps, H_DEV] = maxdev
            hist[steps, H_RETRY] = retries
        steps += 1
    return OK, -1, False, steps, t


# One compiled entry point per model: the constant model id lets the
# compiler drop the other models' branches from every inner kernel.

@njit(cache=True)
def _advance_burgers(state, run, data, bc, ops, hist):
    return advance(BURGERS, state, run, data, bc, ops, hist)


@njit(cache=True)
def _advance_bfe(state, run, data, bc, ops, hist):
    return advance(BFE, state, run, data, bc, ops, hist)


@njit(cache=True)
def _advance_linear(state, run, data, bc, ops, hist):
    return advance(LINEAR, state, run, data, bc, ops, hist)


_ADVANCE = {BURGERS: _advance_burgers, BFE: _advance_bfe, LINEAR: _advance_linear}


@dataclass(frozen=True)
class BoundaryGhost:
    """Ghost state rule per component.

    ``0`` copies the trace, ``1`` prescribes the value, ``-1`` negates the
    trace and ``2`` reflects the trace about the value (``2 v - trace``).
    """

    mask: np.ndarray
    values: np.ndarray

    @classmethod
    def transparent(cls, dim: int) -> "BoundaryGhost":
        return cls(np.zeros(dim, dtype=np.int64), np.zeros(dim))

    @classmethod
    def dirichlet(cls, values) -> "BoundaryGhost":
        values = np.asarray(values, dtype=float)
        return cls(np.ones(values.size, dtype=np.int64), values)

    @classmethod
    def wall(cls, dim: int, component: int) -> "BoundaryGhost":
        """Mirror boundary: zero normal flux of ``component``."""
        mask = np.zeros(dim, dtype=np.int64)
        mask[component] = -1
        return cls(mask, np.zeros(dim))

    @classmethod
    def pinned(cls, dim: int, component: int, value: float) -> "BoundaryGhost":
        """Hold ``component`` at ``value`` at the interface by odd reflection."""
        mask = np.zeros(dim, dtype=np.int64)
        mask[component] = 2
        values = np.zeros(dim)
        values[component] = value
        return cls(mask, values)

    def __post_init__(self):
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.mask.shape != self.values.shape:
            raise UsageError("ghost mask and values must have the same length")
        if not np.all(np.isin(self.mask, (-1, 0, 1, 2))):
            raise UsageError("ghost mask entries must be -1, 0, 1 or 2")


@dataclass(frozen=True)
class StepReport:
    """Diagnostics of one time step."""

    t: float
    dt: float
    nu: float
    newton_iterations: int
    fallbacks: int
    max_deviation: float
    dt_retries: int = 0


@dataclass
class SolverState:
    Qbar: np.ndarray
    cache_minus: np.ndarray
    cache_plus: np.ndarray
    anchors: np.ndarray
    t: float = 0.0
    steps: int = 0
    history: list = field(default_factory=list)
    newton_cells: np.ndarray | None = None
    fallback_cells: np.ndarray | None = None

    def copy(self) -> "SolverState":
        return SolverState(self.Qbar.copy(), self.cache_minus.copy(), self.cache_plus.copy(),
                           self.anchors.copy(), self.t, self.steps, list(self.history),
                           None if self.newton_cells is None else self.newton_cells.copy(),
                           None if self.fallback_cells is None else self.fallback_cells.copy())


_STATUS_EXC = {DOMAIN: DomainError, PREDICTOR: PredictorError, STEP: StepFailure}


class Solver:
    """Well-balanced path-conservative solver of order ``P`` on a uniform grid."""

    def __init__(self, model: SystemModel, grid: Grid, P: int, *, well_balanced: bool = True,
                 cfl: float = 0.9, left: BoundaryGhost | None = None,
                 right: BoundaryGhost | None = None, dt_max: float = np.inf):
        if getattr(model, "model_id", None) not in _ADVANCE:
            raise UsageError(f"no compiled time loop for model {model!r}")
        self.model = model
        self.grid = grid
        self.P = check_order(P)
        self.well_balanced = bool(well_balanced)
        if not 0 < cfl <= 1:
            raise UsageError(f"CFL must lie in (0, 1], got {cfl}")
        self.cfl = float(cfl)
        self.dt_max = float(dt_max)
        self.left = left or BoundaryGhost.transparent(model.dim)
        self.right = right or BoundaryGhost.transparent(model.dim)
        ref = ReferenceElementMatrices(self.P)
        self.ref = ref
        self._tab = tableau(self.P)
        self.F = fine_points_per_cell(self.P)
        self.x_fine = grid.fine(self.F)
        self.aux_fine = np.ascontiguousarray(model.aux_at(self.x_fine))
        node_idx = (np.arange(grid.N)[:, None] * self.F
                    + np.arange(self.P)[None, :] * self._tab.substeps)
        self.x_nodes = self.x_fine[node_idx]
        self.aux_nodes = np.ascontiguousarray(self.aux_fine[node_idx])
        self.lam = model.linear_source()

    def state(self, Qbar, cache_minus, cache_plus, t: float = 0.0) -> SolverState:
        N, v = self.grid.N, self.model.dim
        Qbar = np.array(Qbar, dtype=float).reshape(N, v)
        cm = np.array(cache_minus, dtype=float).reshape(N + 1, v)
        cp = np.array(cache_plus, dtype=float).reshape(N + 1, v)
        for arr, what in ((Qbar, "cell average"), (cm, "interface trace"), (cp, "interface trace")):
            for k, Q in enumerate(arr):
                if not self.model.is_admissible(Q):
                    raise DomainError(f"inadmissible initial {what} at index {k}: {Q}", location=k)
        anchors = Qbar[:, self.model.anchor_component].copy()
        return SolverState(Qbar, cm, cp, anchors, float(t), 0, [],
                           np.zeros(N, dtype=np.int64), np.zeros(N, dtype=np.int64))

    def advance(self, state: SolverState, t_final: float, max_steps: int | None = None,
                record: bool = True) -> SolverState:
        """Advance ``state`` in place until ``t_final`` or ``max_steps`` steps."""
        if max_steps is None:
            max_steps = np.iinfo(np.int64).max
        m = self.model
        chunk = 4096
        while state.t < t_final and max_steps > 0:
            n = min(chunk, max_steps)
            hist = np.zeros((n if record else 0, NHIST))
            status, where, at_interface, steps, t = _ADVANCE[m.model_id](
                (state.Qbar, state.cache_minus, state.cache_plus, state.anchors,
                 state.newton_cells, state.fallback_cells),
                (state.t, float(t_final), n, self.grid.dx, self.cfl, self.dt_max,
                 self.well_balanced),
                (self.aux_fine, self.aux_nodes, m.consts, m.anchor_component),
                (self.left.mask, self.left.values, self.right.mask, self.right.values),
                (self.ref.K1, self.ref.F0, self.ref.volume_mass, self.lam, self.ref.deriv_1d,
                 weights(self.P), self._tab.a, self._tab.b, self._tab.cidx, self._tab.substeps),
                hist,
            )
            state.t = float(t)
            state.steps += int(steps)
            if record:
                state.history.extend(StepReport(*row[:3], int(row[3]), int(row[4]), row[5], int(row[6]))
                                     for row in hist[:steps])
            max_steps -= int(steps)
            if status != OK:
                self._raise(status, where, at_interface, state)
        return state

    def _raise(self, status: int, where: int, at_interface: bool, state: SolverState):
        g = self.grid
        if not at_interface:
            x = g.centers[where] if 0 <= where < g.N else None
            what = {DOMAIN: "reconstruction", PREDICTOR: "predictor", STEP: "update"}[status]
            raise _STATUS_EXC[status](
                f"inadmissible state in {what} at cell {where} (x={x}), t={state.t}",
                location=x, cell=where, t=state.t)
        x = g.interfaces[where] if 0 <= where <= g.N else None
        if status == DOMAIN:
            raise DomainError(f"non-positive area in the Riemann problem at interface {where} (x={x}), t={state.t}",
                              location=x, interface=where, t=state.t)
        raise_for_status(status, f"Riemann problem failed at interface {where} (x={x}), t={state.t}",
                         location=x, interface=where, t=state.t)
