"""Hyperbolized blood-flow system with gravity, friction and variable walls.

State ``Q = [A, q, psi, A0, h0, Ee, Ec, pr]`` in CGS units.  The wall
parameters are carried as state components with zero rows in ``A(Q)`` and
``S(Q)``, so parameter jumps become standing (zero-speed) waves.
"""

from __future__ import annotations


import numpy as np
from numba import njit

from ..errors import DomainError, UsageError
from ..model import BFE, DOMAIN, OK, SINGULAR, Kernels, SystemModel, raise_for_status
from .profiles import VesselProfile
from .riemann import IA, IA0, IEC, IEE, IH0, IPR, IPSI, IQ, RiemannFan, two_rarefaction
from .tubelaw import (
    EPS,
    FRIC,
    GAMMA,
    KIND,
    MC,
    ME,
    NCONSTS,
    NUP,
    RC,
    RHO,
    TubeLawValue,
    evaluate,
    pressure_potential,
    sound_speed,
    tube_invert,
    tube_partials,
)

DIM = 8
# aux layout: gravity, the five parameters, then their x-derivatives
AUX_G = 0
AUX_PAR = 1
AUX_DPAR = 6
NAUX = 11

COMPONENTS = ("A", "q", "psi", "A0", "h0", "Ee", "Ec", "pr")


@njit(cache=True, inline="always")
def _matvec(Q, W, c, out):
    A = Q[IA]
    u = Q[IQ] / A
    z = tube_partials(A, Q[IPSI], Q[IA0], Q[IH0], Q[IEE], Q[IEC], c)
    ar = A / c[RHO]
    c2 = ar * z[1]
    out[0] = W[IQ]
    out[1] = (c2 - u * u) * W[IA] + 2.0 * u * W[IQ] + ar * (
        z[2] * W[IPSI] + z[3] * W[IA0] + z[4] * W[IH0] + z[5] * W[IEE] + z[6] * W[IEC] + W[IPR]
    )
    out[2] = (-1.0 / c[EPS]) * W[IQ]
    for k in range(3, 8):
        out[k] = 0.0


@njit(cache=True, inline="always")
def _source(Q, a, c, out):
    A = Q[IA]
    out[0] = 0.0
    out[1] = c[FRIC] * Q[IQ] / A + A * a[AUX_G]
    out[2] = (-1.0 / c[EPS]) * Q[IPSI]
    for k in range(3, 8):
        out[k] = 0.0


@njit(cache=True, inline="always")
def _linear_source(c, out):
    for k in range(out.size):
        out[k] = 0.0
    out[IPSI] = -1.0 / c[EPS]


@njit(cache=True, inline="always")
def _speed(Q, c):
    A = Q[IA]
    return abs(Q[IQ] / A) + sound_speed(A, Q[IA0], Q[IH0], Q[IEE], Q[IEC], c)


@njit(cache=True, inline="always")
def _flux(A, q, Q, c):
    """Momentum flux ``q²/A + B(A)`` with the wall parameters of ``Q``."""
    return q * q / A + pressure_potential(A, Q[IA0], Q[IH0], Q[IEE], Q[IEC], c)


@njit(cache=True, inline="always")
def _fluct(QL, QR, c, Dm, Dp, SL, SR):
    info = np.empty(6)
    status = two_rarefaction(QL, QR, c, SL, SR, info)
    if status != OK:
        return status
    for k in range(Dm.size):
        Dm[k] = 0.0
        Dp[k] = 0.0
    eps = c[EPS]
    Dm[0] = SL[IQ] - QL[IQ]
    Dm[1] = _flux(SL[IA], SL[IQ], QL, c) - _flux(QL[IA], QL[IQ], QL, c)
    Dm[2] = -(SL[IQ] - QL[IQ]) / eps
    Dp[0] = QR[IQ] - SR[IQ]
    Dp[1] = _flux(QR[IA], QR[IQ], QR, c) - _flux(SR[IA], SR[IQ], QR, c)
    Dp[2] = -(QR[IQ] - SR[IQ]) / eps
    gam = c[GAMMA]
    if gam != 0.0:
        # segment path for the (A/rho) Gamma psi_x coupling
        Dm[1] += gam / c[RHO] * 0.5 * (QL[IA] + SL[IA]) * (SL[IPSI] - QL[IPSI])
        Dp[1] += gam / c[RHO] * 0.5 * (SR[IA] + QR[IA]) * (QR[IPSI] - SR[IPSI])
    return OK


@njit(cache=True, inline="always")
def _stat_rhs(Q, a, c, out):
    A = Q[IA]
    q = Q[IQ]
    z = tube_partials(A, 0.0, a[AUX_PAR], a[AUX_PAR + 1], a[AUX_PAR + 2], a[AUX_PAR + 3], c)
    ar = A / c[RHO]
    c2 = ar * z[1]
    u = q / A
    den = c2 - u * u
    if not (abs(den) > 1e-12 * c2):
        return SINGULAR
    walls = (z[3] * a[AUX_DPAR] + z[4] * a[AUX_DPAR + 1] + z[5] * a[AUX_DPAR + 2]
             + z[6] * a[AUX_DPAR + 3] + a[AUX_DPAR + 4])
    out[IA] = (c[FRIC] * q / A + A * a[AUX_G] - ar * walls) / den
    out[IQ] = 0.0
    out[IPSI] = 0.0
    for k in range(5):
        out[IA0 + k] = a[AUX_DPAR + k]
    return OK


@njit(cache=True, inline="always")
def _stat_seed(Qbar, a, c, out):
    out[IA] = Qbar[IA]
    out[IQ] = Qbar[IQ]
    out[IPSI] = 0.0
    for k in range(5):
        out[IA0 + k] = a[AUX_PAR + k]


@njit(cache=True, inline="always")
def _stat_node(Q, a, c):
    Q[IPSI] = 0.0
    for k in range(5):
        Q[IA0 + k] = a[AUX_PAR + k]


@njit(cache=True, inline="always")
def _admissible(Q, c):
    for k in range(Q.size):
        if not np.isfinite(Q[k]):
            return False
    return Q[IA] > 0.0 and Q[IA0] > 0.0 and Q[IH0] > 0.0 and Q[IEE] > 0.0 and Q[IEC] > 0.0


KERNELS = Kernels(
    _matvec, _source, _linear_source, _speed, _fluct,
    _stat_rhs, _stat_seed, _stat_node, _admissible,
)


def model_constants(profile: VesselProfile) -> np.ndarray:
    law = profile.law
    c = np.zeros(NCONSTS)
    c[RHO] = profile.rho
    c[FRIC] = profile.R
    c[EPS] = profile.eps
    c[GAMMA] = law.gamma
    c[NUP] = law.poisson
    c[ME] = law.m_e
    c[MC] = law.m_c
    c[KIND] = law.kind_code
    c[RC] = law.onset
    return c


class BFEModel(SystemModel):
    """Blood-flow model bound to one :class:`VesselProfile`."""

    name = "bfe"
    model_id = BFE
    dim = DIM
    naux = NAUX
    anchor_component = IA
    component_names = COMPONENTS

    def __init__(self, profile: VesselProfile):
        self.profile = profile
        self.consts = model_constants(profile)
        self.kernels = KERNELS

    def aux_at(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p = self.profile
        cols = [p.gravity(x)]
        cols += [f(x) for f in p.parameters]
        cols += [f.derivative(x) for f in p.parameters]
        return np.column_stack(cols)

    def parameters_at(self, x) -> np.ndarray:
        return self.aux_at(x)[:, AUX_PAR:AUX_PAR + 5]

    def eigenvalues(self, Q) -> np.ndarray:
        Q = self._state(Q)
        u = Q[IQ] / Q[IA]
        cs = sound_speed(Q[IA], Q[IA0], Q[IH0], Q[IEE], Q[IEC], self.consts)
        return np.array([u - cs, 0, 0, 0, 0, 0, 0, u + cs], dtype=float)

    def sound_speed(self, Q) -> float:
        Q = self._state(Q)
        return float(sound_speed(Q[IA], Q[IA0], Q[IH0], Q[IEE], Q[IEC], self.consts))

    def pressure(self, Q) -> np.ndarray:
        """Total pressure ``pr + zeta`` for one state or an ``(n, 8)`` array."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        out = np.empty(len(Q))
        for i, s in enumerate(Q):
            out[i] = s[IPR] + tube_partials(s[IA], s[IPSI], s[IA0], s[IH0], s[IEE], s[IEC], self.consts)[0]
        return out

    def derived(self, Q) -> dict[str, np.ndarray]:
        """Velocity, sound speed and pressure for an ``(n, 8)`` array."""
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        cs = np.array([sound_speed(s[IA], s[IA0], s[IH0], s[IEE], s[IEC], self.consts) for s in Q])
        return {"u": Q[:, IQ] / Q[:, IA], "c": cs, "p": self.pressure(Q)}

    def area_for_pressure(self, p, x) -> np.ndarray:
        """Invert the tube law (``psi = 0``) at total pressure ``p`` and positions ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p = np.broadcast_to(np.asarray(p, dtype=float), x.shape)
        par = self.parameters_at(x)
        out = np.empty(x.size)
        for i in range(x.size):
            A0, h0, Ee, Ec, pr = par[i]
            out[i] = tube_invert(p[i] - pr, A0, h0, Ee, Ec, self.consts)
            if not out[i] > 0:
                raise DomainError(f"tube law cannot reach pressure {p[i]} at x={x[i]}", location=x[i])
        return out

    def hydrostatic_pressure(self, x, p_out: float) -> np.ndarray:
        """Zero-flow pressure with ``dp/dx = rho g_x`` and ``p(L) = p_out``."""
        g = self.profile.gravity
        L = self.profile.length
        return p_out - self.profile.rho * (g.antiderivative(L) - g.antiderivative(np.asarray(x, dtype=float)))

    def rest_state(self, x, p) -> np.ndarray:
        """States with zero flow and total pressure ``p`` at positions ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        Q = np.zeros((x.size, DIM))
        Q[:, IA] = self.area_for_pressure(p, x)
        Q[:, IA0:] = self.parameters_at(x)
        return Q

    def hydrostatic_state(self, x, p_out: float) -> np.ndarray:
        return self.rest_state(x, self.hydrostatic_pressure(x, p_out))


def _model(profile) -> BFEModel:
    if isinstance(profile, BFEModel):
        return profile
    if isinstance(profile, VesselProfile):
        return BFEModel(profile)
    raise UsageError("expected a VesselProfile or BFEModel")


def tube_law(A: float, psi: float, x: float, profile) -> TubeLawValue:
    """Tube-law pressure and its six partials at area ``A`` and position ``x``."""
    if not A > 0:
        raise DomainError(f"tube law needs A > 0, got {A}", location=x)
    m = _model(profile)
    A0, h0, Ee, Ec, pr = m.parameters_at(x)[0]
    return evaluate(A, psi, A0, h0, Ee, Ec, pr, m.consts)


def bfe_eigenvalues(Q, profile) -> np.ndarray:
    """``(u - c, 0 x 6, u + c)``."""
    return _model(profile).eigenvalues(Q)


def bfe_stationary_rhs(x: float, Qred, profile) -> float:
    """``dA/dx`` of a stationary solution with constant flow ``q``."""
    m = _model(profile)
    A, q = map(float, Qred)
    if not A > 0:
        raise DomainError(f"stationary ODE needs A > 0, got {A}", location=x)
    a = m.aux_at(x)[0]
    Q = np.zeros(DIM)
    Q[IA], Q[IQ] = A, q
    Q[IA0:] = a[AUX_PAR:AUX_PAR + 5]
    out = np.empty(DIM)
    status = _stat_rhs(Q, a, m.consts, out)
    raise_for_status(status, f"sonic point in the stationary ODE at x={x}", location=x)
    return float(out[IA])


def two_rarefaction_riemann(QL, QR, profile) -> RiemannFan:
    """Solve the interface Riemann problem for the blood-flow system."""
    m = _model(profile)
    QL = np.array(QL, dtype=float).reshape(DIM)
    QR = np.array(QR, dtype=float).reshape(DIM)
    SL, SR, info = np.empty(DIM), np.empty(DIM), np.zeros(6)
    status = two_rarefaction(QL, QR, m.consts, SL, SR, info)
    if status == DOMAIN:
        raise DomainError("non-positive area in the Riemann problem", QL=QL, QR=QR)
    raise_for_status(status, "two-rarefaction solver failed", QL=QL, QR=QR,
                     last_iterate=SL[IA], iterations=int(info[0]))
    return RiemannFan(SL, SR, (info[2], info[3], info[4], info[5]), int(info[0]), float(info[1]))


def bfe_flux_potential(A: float, Q, profile) -> float:
    """``B(A)`` with the wall parameters of ``Q``."""
    m = _model(profile)
    Q = np.asarray(Q, dtype=float)
    return float(pressure_potential(A, Q[IA0], Q[IH0], Q[IEE], Q[IEC], m.consts))


__all__ = [
    "BFEModel", "bfe_eigenvalues", "bfe_stationary_rhs", "two_rarefaction_riemann",
    "tube_law", "model_constants", "COMPONENTS",
]
