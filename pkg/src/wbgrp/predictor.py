"""Well-balanced local space-time predictor.

Inside each cell the deviation ``d = Q - Q*`` from the local stationary
solution is evolved over one time step on the reference element
``(xi, tau) in [0, 1]^2`` with a tensor-product nodal basis
``theta_l(xi, tau) = phi_a(xi) phi_b(tau)``, ``l = b P + a``.  Integrating
by parts in time gives, per state component ``j``,

    (K1 - dt lam_j M) d = F0 d0 + M r(d)

where ``lam`` is the diagonal linear part of the source (treated
implicitly) and ``r`` collects the lagged non-conservative and nonlinear
source differences between the prediction and ``Q*``.  A fixed number of
Picard passes (equal to the order) is performed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import PredictorError, UsageError
from . import dispatch as dk
from .model import OK, PREDICTOR, SystemModel
from .quadrature import check_order, lagrange_derivative_matrix, lagrange_matrix, nodes, weights


class ReferenceElementMatrices:
    """Exactly integrated reference-element matrices for order ``P``."""

    def __init__(self, P: int):
        self.P = P = check_order(P)
        self.nodes = xi = nodes(P)
        self.weights = weights(P)
        g, gw = np.polynomial.legendre.leggauss(P + 2)
        g = 0.5 * (g + 1.0)
        gw = 0.5 * gw
        phi = lagrange_matrix(xi, g)
        dphi = lagrange_derivative_matrix(xi, g)
        self.mass_1d = phi.T @ (gw[:, None] * phi)
        # stiff_1d[a, a2] = ∫ phi_a phi_a2'
        self.stiff_1d = phi.T @ (gw[:, None] * dphi)
        self.deriv_1d = lagrange_derivative_matrix(xi)
        eye = np.eye(P)
        e0 = lagrange_matrix(xi, [0.0])[0]
        e1 = lagrange_matrix(xi, [1.0])[0]
        Mx = Mt = self.mass_1d
        # l = b P + a  ->  kron(time factor, space factor)
        self.volume_mass = np.kron(Mt, Mx)
        self.end_mass = np.kron(np.outer(e1, e1), Mx)
        # <d_tau theta_k, theta_l> = ∫ phi_bk' phi_bl  x  Mx
        self.time_stiffness = np.kron(self.stiff_1d.T, Mx)
        self.space_stiffness = np.kron(Mt, self.stiff_1d)
        self.initial_trace = np.kron(e0[:, None], Mx)
        self.K1 = self.end_mass - self.time_stiffness
        self.F0 = self.initial_trace
        self.space_derivative = np.linalg.solve(self.volume_mass, self.space_stiffness)
        self._identity = eye

    def operators(self, lam: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """``(G, H)`` with ``G_j = L_j^-1 F0`` and ``H_j = L_j^-1 M``."""
        v = lam.size
        P2 = self.P**2
        G = np.empty((v, P2, self.P))
        H = np.empty((v, P2, P2))
        build_operators(self.K1, self.F0, self.volume_mass, np.asarray(lam, float), float(dt), G, H)
        return G, H


@njit(cache=True)
def build_operators(K1, F0, M, lam, dt, G, H):
    v = lam.size
    for j in range(v):
        done = False
        for i in range(j):
            if lam[i] == lam[j]:
                G[j] = G[i]
                H[j] = H[i]
                done = True
                break
        if done:
            continue
        Linv = np.linalg.inv(K1 - (dt * lam[j]) * M)
        G[j] = Linv @ F0
        H[j] = Linv @ M


@njit(cache=True)
def nodal_derivative(mid, D, Q, P, DQ):
    """``d/dxi`` at the spatial nodes for every block of ``P`` rows of ``Q`` (n, v)."""
    v = dk.state_dim(mid, Q.shape[1])
    for base in range(0, Q.shape[0], P):
        for a in range(P):
            for m in range(v):
                acc = 0.0
                for a2 in range(P):
                    acc += D[a, a2] * Q[base + a2, m]
                DQ[base + a, m] = acc


@njit(cache=True)
def stationary_terms(mid, Qs, aux, lam, D, c, AdQs, Ss, DQs):
    """``A(Q*) D Q*`` and the nonlinear source part at every spatial node.

    All arrays hold one row per (cell, spatial node).
    """
    P = D.shape[0]
    v = dk.state_dim(mid, Qs.shape[1])
    nodal_derivative(mid, D, Qs, P, DQs)
    dk.matvec_block(mid, Qs, DQs, c, AdQs)
    dk.source_block(mid, Qs, aux, P, P, c, Ss)
    for k in range(Qs.shape[0]):
        for m in range(v):
            Ss[k, m] = Ss[k, m] - lam[m] * Qs[k, m]


@njit(cache=True)
def apply_operators(mid, G, H, d0, r, d):
    """``d_j = G_j d0_j + H_j r_j`` per component, cell by cell."""
    P2 = H.shape[1]
    P = G.shape[2]
    v = dk.state_dim(mid, d.shape[1])
    N = d.shape[0] // P2
    for i in range(N):
        s0 = i * P
        s = i * P2
        for m in range(v):
            for l in range(P2):
                acc = 0.0
                for a in range(P):
                    acc += G[m, l, a] * d0[s0 + a, m]
                for l2 in range(P2):
                    acc += H[m, l, l2] * r[s + l2, m]
                d[s + l, m] = acc


@njit(cache=True)
def predict(mid, W, Qs, aux, lam, dt, dtdx, D, G, H, c,
            out, AdQs, Ss, d0, d, r, DQ, t1, t2):
    """Fixed-point predictor for all cells.

    ``W``, ``Qs``, ``aux``, ``AdQs``, ``Ss`` and ``d0`` hold one row per
    (cell, spatial node); ``out`` and the remaining scratch one row per
    (cell, space-time node), ``l = b P + a`` within a cell.  Without
    well-balancing ``Qs``, ``AdQs`` and ``Ss`` are zero, which leaves every
    operation below exact.  Every Picard iterate is checked for
    admissibility.  Returns ``(status, cell)``.
    """
    P = D.shape[0]
    P2 = P * P
    v = dk.state_dim(mid, W.shape[1])
    N = W.shape[0] // P
    for k in range(N * P):
        for m in range(v):
            d0[k, m] = W[k, m] - Qs[k, m]
    for k in range(N * P2):
        ks = (k // P2) * P + k % P
        for m in range(v):
            d[k, m] = d0[ks, m]
    for it in range(P + 1):
        for k in range(N * P2):
            ks = (k // P2) * P + k % P
            for m in range(v):
                out[k, m] = d[k, m] + Qs[ks, m]
        bad = dk.admissible_block(mid, out, c)
        if bad >= 0:
            return PREDICTOR, bad // P2
        if it == P:
            break
        nodal_derivative(mid, D, out, P, DQ)
        dk.matvec_block(mid, out, DQ, c, t1)
        dk.source_block(mid, out, aux, P, P2, c, t2)
        for k in range(N * P2):
            ks = (k // P2) * P + k % P
            for m in range(v):
                snl = t2[k, m] - lam[m] * out[k, m]
                r[k, m] = -dtdx * (t1[k, m] - AdQs[ks, m]) + dt * (snl - Ss[ks, m])
        apply_operators(mid, G, H, d0, r, d)
    return OK, -1


@dataclass
class SpaceTimePolynomial:
    """Nodal space-time prediction of one cell, ``values = deviation + stationary``."""

    P: int
    values: np.ndarray
    stationary: np.ndarray
    deviation: np.ndarray = field(init=False)

    def __post_init__(self):
        self.deviation = self.values - self.stationary

    def nodal(self, b: int, a: int) -> np.ndarray:
        return self.values[b * self.P + a]

    def __call__(self, xi: float, tau: float) -> np.ndarray:
        return evaluate_prediction(self, xi, tau)


def evaluate_prediction(poly: SpaceTimePolynomial, xi: float, tau: float) -> np.ndarray:
    """Lagrange evaluation at reference coordinates; bitwise exact at nodes."""
    P = poly.P
    xn = nodes(P)
    ia = np.flatnonzero(xn == xi)
    ib = np.flatnonzero(xn == tau)
    if ia.size and ib.size:
        return poly.values[ib[0] * P + ia[0]].copy()
    phx = lagrange_matrix(xn, [xi])[0]
    pht = lagrange_matrix(xn, [tau])[0]
    weights_st = np.kron(pht, phx)
    return weights_st @ poly.values


def predictor_fixed_point(model: SystemModel, w_nodal, Qstar_nodal, dx: float, dt: float,
                          x_left: float = 0.0) -> SpaceTimePolynomial:
    """Space-time prediction from reconstruction values ``w_nodal`` (P, v).

    ``Qstar_nodal=None`` switches well-balancing off (``Q* = 0`` without
    evaluating the model at the zero state).
    """
    W = np.array(w_nodal, dtype=float).reshape(-1, model.dim)
    P = check_order(W.shape[0])
    if not dt > 0:
        raise UsageError("dt must be positive")
    wb = Qstar_nodal is not None
    Qs = np.zeros_like(W) if not wb else np.array(Qstar_nodal, dtype=float).reshape(P, model.dim)
    ref = ReferenceElementMatrices(P)
    lam = model.linear_source()
    G, H = ref.operators(lam, dt)
    aux_n = model.aux_at(x_left + dx * ref.nodes)
    v, P2 = model.dim, P * P
    out = np.empty((P2, v))
    AdQs, Ss = np.zeros((P, v)), np.zeros((P, v))
    aux_n = np.ascontiguousarray(aux_n)
    if wb:
        stationary_terms(model.model_id, Qs, aux_n, lam, ref.deriv_1d, model.consts,
                         AdQs, Ss, np.empty((P, v)))
    status, _ = predict(
        model.model_id, W, Qs, aux_n, lam, float(dt), float(dt / dx), ref.deriv_1d, G, H,
        model.consts, out, AdQs, Ss, np.empty((P, v)),
        *(np.empty((P2, v)) for _ in range(5)),
    )
    if status != OK:
        raise PredictorError("inadmissible predictor state", location=0)
    stationary = np.repeat(Qs[None], P, axis=0).reshape(P2, v)
    return SpaceTimePolynomial(P, out, stationary)
