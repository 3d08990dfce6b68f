"""Turn a :class:`ScenarioConfig` into a ready-to-run solver and initial state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ..bfe import Constant, Linear, TubeLaw, VesselProfile, gravity_profile, taper
from ..bfe.model import BFEModel
from ..bfe.profiles import MMHG, load_samples_csv, polyline_on
from ..bfe.riemann import IA, IQ
from ..burgers import BurgersModel, burgers_exact_average, burgers_initial_condition
from ..errors import ConfigError
from ..model import Grid, SystemModel
from ..quadrature import fine_points_per_cell, weights
from ..solver import BoundaryGhost, Solver, SolverState
from ..stationary import march_chain
from .config import ProfileSpec, ScenarioConfig, VesselSpec, load_config

GAUSS_POINTS = 16


@dataclass
class Setup:
    config: ScenarioConfig
    model: SystemModel
    grid: Grid
    solver: Solver
    state: SolverState
    # (name, component) pairs entering error norms and drift reports
    variables: tuple[tuple[str, int], ...]
    exact: Callable[[Grid], np.ndarray] | None


def builtin_scenario(name: str) -> ScenarioConfig:
    return load_config(name)


def cell_averages(f: Callable, grid: Grid, breaks=(), n: int = GAUSS_POINTS) -> np.ndarray:
    """Gauss-Legendre cell averages of ``f``; cells are split at ``breaks``."""
    gx, gw = np.polynomial.legendre.leggauss(n)
    edges = grid.interfaces
    breaks = np.asarray(sorted(breaks), dtype=float)
    pieces, owner = [], []
    for i in range(grid.N):
        a, b = edges[i], edges[i + 1]
        inner = breaks[(breaks > a) & (breaks < b)]
        pts = np.concatenate(([a], inner, [b]))
        pieces.extend(zip(pts[:-1], pts[1:]))
        owner.extend([i] * (pts.size - 1))
    lo, hi = np.array(pieces).T
    x = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * gx[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape + (-1,))
    sums = 0.5 * (hi - lo)[:, None] * np.einsum("k,pkv->pv", gw, vals)
    out = np.zeros((grid.N, sums.shape[1]))
    np.add.at(out, np.array(owner), sums)
    return out / grid.dx


def _profile(spec: ProfileSpec, length: float):
    if spec.kind == "constant":
        return Constant(spec.args[0])
    if spec.kind == "taper":
        return taper(spec.args[0], length)
    if spec.kind == "linear":
        return Linear(0.0, spec.args[0], length, spec.args[1])
    xs, vs = load_samples_csv(spec.path)
    return polyline_on(xs, vs, length)


def vessel_profile(spec: VesselSpec) -> VesselProfile:
    L = spec.length
    g = spec.gravity
    if g.kind == "polyline":
        gravity = gravity_profile("polyline", g.path, L)
    else:
        gravity = gravity_profile(g.kind, g.value, L)
    try:
        law = TubeLaw(kind=spec.law, onset=spec.onset, gamma=spec.gamma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return VesselProfile(L, _profile(spec.A0, L), _profile(spec.h0, L), _profile(spec.Ee, L),
                         _profile(spec.Ec, L), _profile(spec.pr, L), gravity,
                         rho=spec.rho, mu=spec.mu, friction=spec.friction, eps=spec.eps, law=law)


# -- blood flow --------------------------------------------------------------

def _pinned_pressure(cfg: ScenarioConfig, model: BFEModel) -> tuple[float, float]:
    """``(x, p)`` fixing the rest-state pressure level, in dyn/cm²."""
    L = cfg.vessel.length
    for x, bc in ((L, cfg.right), (0.0, cfg.left)):
        if bc.kind == "pressure":
            return x, bc.value * MMHG
        if bc.kind == "area":
            Q = np.zeros(model.dim)
            Q[IA] = bc.value
            Q[3:] = model.parameters_at([x])[0]
            return x, float(model.pressure(Q)[0])
    return L, cfg.p_out * MMHG


def hydrostatic(model: BFEModel, x_ref: float, p_ref: float) -> Callable:
    """Exact zero-flow state ``x -> Q`` with ``p(x_ref) = p_ref``."""
    G = model.profile.gravity.antiderivative
    rho = model.profile.rho

    def f(x):
        x = np.asarray(x, dtype=float)
        return model.rest_state(x, p_ref + rho * (G(x) - G(x_ref)))

    return f


def discrete_rest_chain(model: SystemModel, grid: Grid, P: int, anchor_state: np.ndarray,
                        x_ref: float, component: int) -> np.ndarray:
    """Stationary nodal chain (N, P, v) marched from the left end.

    The inlet value of ``component`` is tuned so that the chain passes
    through ``anchor_state`` at ``x_ref`` (one of the domain ends).
    """
    xf = grid.fine(fine_points_per_cell(P))
    target = float(anchor_state[component])

    def chain(s):
        Q0 = anchor_state.copy()
        Q0[component] = s
        if isinstance(model, BFEModel):
            Q0[3:] = model.parameters_at([grid.x_A])[0]
        return march_chain(model, xf, Q0, P)

    if x_ref == grid.x_A:
        return chain(target)

    def miss(s):
        return chain(s)[-1, -1, component] - target

    lo, hi = 0.5 * target, 2.0 * target
    if target < 0:
        lo, hi = hi, lo
    try:
        s = brentq(miss, lo, hi, xtol=1e-15 * abs(target), rtol=1e-15, maxiter=200)
    except ValueError:
        raise ConfigError("could not find a stationary chain through the boundary state") from None
    return chain(s)


def _bfe_setup(cfg: ScenarioConfig):
    model = BFEModel(vessel_profile(cfg.vessel))
    grid = Grid(cfg.x_a, cfg.x_b, cfg.cells)
    x_ref, p_ref = _pinned_pressure(cfg, model)
    exact_state = hydrostatic(model, x_ref, p_ref)
    breaks = model.profile.breakpoints
    pinned = {}
    if cfg.ic == "stationary":
        chain = discrete_rest_chain(model, grid, cfg.order, exact_state([x_ref])[0], x_ref, IA)
        Qbar = np.einsum("p,ipv->iv", weights(cfg.order), chain)
        traces = np.vstack([chain[:, 0], chain[-1:, -1]])
        # pin the boundary to the chain's own end value so the state is exactly discrete-stationary
        pinned = {0.0: chain[0, 0, IA], cfg.x_b: chain[-1, -1, IA]}
    else:
        f = exact_state if cfg.ic == "hydrostatic" else (
            lambda x: model.rest_state(x, np.full(np.size(x), cfg.p_out * MMHG)))
        Qbar = cell_averages(f, grid, breaks)
        traces = f(grid.interfaces)

    def ghost(bc, x):
        if bc.kind == "wall":
            return BoundaryGhost.wall(model.dim, IQ)
        if bc.kind == "transparent":
            return BoundaryGhost.transparent(model.dim)
        if x in pinned:
            area = pinned[x]
        elif bc.kind == "pressure":
            area = model.area_for_pressure(bc.value * MMHG, [x])[0]
        else:
            area = bc.value
        return BoundaryGhost.pinned(model.dim, IA, area)

    left, right = ghost(cfg.left, 0.0), ghost(cfg.right, cfg.x_b)

    def exact(g: Grid) -> np.ndarray:
        return cell_averages(exact_state, g, breaks)

    return model, grid, Qbar, traces, left, right, (("A", IA), ("q", IQ)), exact


# -- Burgers -----------------------------------------------------------------

def _burgers_setup(cfg: ScenarioConfig):
    model = BurgersModel()
    grid = Grid(cfg.x_a, cfg.x_b, cfg.cells)

    def ghost(bc):
        if bc.kind == "value":
            return BoundaryGhost.dirichlet([bc.value])
        return BoundaryGhost.transparent(1)

    left, right = ghost(cfg.left), ghost(cfg.right)
    if cfg.ic == "stationary":
        if cfg.left.kind != "value":
            raise ConfigError("a stationary Burgers start needs an inflow value on the left")
        chain = discrete_rest_chain(model, grid, cfg.order, np.array([cfg.left.value]), grid.x_A, 0)
        Qbar = np.einsum("p,ipv->iv", weights(cfg.order), chain)
        traces = np.vstack([chain[:, 0], chain[-1:, -1]])
    else:
        Qbar = cell_averages(lambda x: burgers_initial_condition(x)[:, None], grid)
        traces = burgers_initial_condition(grid.interfaces)[:, None]

    def exact(g: Grid) -> np.ndarray:
        a = g.interfaces
        return burgers_exact_average(a[:-1], a[1:])[:, None]

    return model, grid, Qbar, traces, left, right, (("q", 0),), exact


def build(cfg: ScenarioConfig) -> Setup:
    """Model, grid, solver and initial state of a scenario."""
    parts = _bfe_setup(cfg) if cfg.model == "bfe" else _burgers_setup(cfg)
    model, grid, Qbar, traces, left, right, variables, exact = parts
    solver = Solver(model, grid, cfg.order, well_balanced=cfg.well_balanced, cfl=cfg.cfl,
                    left=left, right=right, dt_max=cfg.dt_max)
    state = solver.state(Qbar, traces, traces.copy())
    return Setup(cfg, model, grid, solver, state, variables,
                 exact if cfg.reference == "analytic" else None)


def numerical_steady_state(setup: Setup) -> np.ndarray:
    """Cell averages of the discrete stationary solution selected by the boundary data."""
    cfg = setup.config
    if cfg.model == "burgers":
        chain = discrete_rest_chain(setup.model, setup.grid, cfg.order,
                                    np.array([cfg.left.value]), setup.grid.x_A, 0)
    else:
        x_ref, p_ref = _pinned_pressure(cfg, setup.model)
        anchor = hydrostatic(setup.model, x_ref, p_ref)([x_ref])[0]
        chain = discrete_rest_chain(setup.model, setup.grid, cfg.order, anchor, x_ref, IA)
    return np.einsum("p,ipv->iv", weights(cfg.order), chain)
