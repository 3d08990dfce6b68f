"""Pressure-area laws for the vessel wall.

Two laws share one kernel, selected by ``consts[KIND]``:

``power``
    ``zeta = Ke (r^me - 1) + Kc (r^mc - 1) + Gamma psi``
``recruit`` (default)
    ``zeta = Ke (r^me - 1) + Kc max(r - rc, 0)^mc + Gamma psi``

with ``r = A/A0`` and ``K = sqrt(pi) h0 E / ((1 - nu^2) sqrt(A0))``.  In
the recruiting law the collagen fibres only engage beyond the stretch
``rc``; it is C² for ``mc = 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

# consts layout
RHO, FRIC, EPS, GAMMA, NUP, ME, MC, KIND, RC = range(9)
NCONSTS = 9
POWER, RECRUIT = 0, 1

# tube_eval output layout
Z, Z_A, Z_PSI, Z_A0, Z_H0, Z_EE, Z_EC = range(7)

_SQRT_PI = math.sqrt(math.pi)


@njit(cache=True)
def stiffness(A0, h0, E, c):
    nu = c[NUP]
    return _SQRT_PI * h0 * E / ((1.0 - nu * nu) * math.sqrt(A0))


@njit(cache=True)
def _collagen(r, c):
    """Collagen shape function and its r-derivative."""
    mc = c[MC]
    if c[KIND] == POWER:
        return r ** mc - 1.0, mc * r ** (mc - 1.0)
    s = r - c[RC]
    if s <= 0.0:
        return 0.0, 0.0
    return s ** mc, mc * s ** (mc - 1.0)


@njit(cache=True)
def tube_partials(A, psi, A0, h0, Ee, Ec, c):
    """zeta and its partials as a tuple in the Z_* order."""
    me = c[ME]
    Ke = stiffness(A0, h0, Ee, c)
    Kc = stiffness(A0, h0, Ec, c)
    r = A / A0
    fe = r ** me - 1.0
    dfe = me * r ** (me - 1.0)
    fc, dfc = _collagen(r, c)
    elastic = Ke * fe + Kc * fc
    slope = Ke * dfe + Kc * dfc
    # K ~ A0^(-1/2) and r = A/A0
    return (
        elastic + c[GAMMA] * psi,
        slope / A0,
        c[GAMMA],
        -0.5 * elastic / A0 - r * slope / A0,
        elastic / h0,
        Ke * fe / Ee,
        Kc * fc / Ec if Ec != 0.0 else 0.0,
    )


@njit(cache=True)
def tube_eval(A, psi, A0, h0, Ee, Ec, c, out):
    """Fill ``out`` with zeta and its partials (see the Z_* layout)."""
    vals = tube_partials(A, psi, A0, h0, Ee, Ec, c)
    for k in range(7):
        out[k] = vals[k]


@njit(cache=True)
def tube_zeta(A, psi, A0, h0, Ee, Ec, c):
    Ke = stiffness(A0, h0, Ee, c)
    Kc = stiffness(A0, h0, Ec, c)
    fc, _ = _collagen(A / A0, c)
    return Ke * ((A / A0) ** c[ME] - 1.0) + Kc * fc + c[GAMMA] * psi


@njit(cache=True)
def tube_zeta_A(A, A0, h0, Ee, Ec, c):
    Ke = stiffness(A0, h0, Ee, c)
    Kc = stiffness(A0, h0, Ec, c)
    r = A / A0
    _, dfc = _collagen(r, c)
    return (Ke * c[ME] * r ** (c[ME] - 1.0) + Kc * dfc) / A0


@njit(cache=True)
def sound_speed(A, A0, h0, Ee, Ec, c):
    return math.sqrt(A * tube_zeta_A(A, A0, h0, Ee, Ec, c) / c[RHO])


@njit(cache=True)
def pressure_potential(A, A0, h0, Ee, Ec, c):
    """``B(A) = (1/rho) ∫ a zeta_A(a) da`` so that ``B'(A) = c²``."""
    me = c[ME]
    mc = c[MC]
    Ke = stiffness(A0, h0, Ee, c)
    Kc = stiffness(A0, h0, Ec, c)
    r = A / A0
    b = Ke * me * A0 * (r ** (me + 1.0) - 1.0) / (me + 1.0)
    if c[KIND] == POWER:
        b += Kc * mc * A0 * (r ** (mc + 1.0) - 1.0) / (mc + 1.0)
    else:
        s = r - c[RC]
        if s > 0.0:
            b += Kc * A0 * (mc * s ** (mc + 1.0) / (mc + 1.0) + c[RC] * s ** mc)
    return b / c[RHO]


@njit(cache=True)
def tube_invert(target, A0, h0, Ee, Ec, c):
    """Area with ``zeta(A, psi=0) = target``; safeguarded Newton.

    Returns -1.0 if no root is bracketed.
    """
    lo = 1e-8 * A0
    hi = A0
    while tube_zeta(hi, 0.0, A0, h0, Ee, Ec, c) < target:
        hi *= 2.0
        if hi > 1e8 * A0:
            return -1.0
    if tube_zeta(lo, 0.0, A0, h0, Ee, Ec, c) > target:
        return -1.0
    A = A0
    for _ in range(200):
        g = tube_zeta(A, 0.0, A0, h0, Ee, Ec, c) - target
        if g == 0.0:
            return A
        if g < 0.0:
            lo = A
        else:
            hi = A
        dg = tube_zeta_A(A, A0, h0, Ee, Ec, c)
        An = A - g / dg
        if not (lo < An < hi):
            An = 0.5 * (lo + hi)
        if abs(An - A) <= 2e-16 * A:
            return An
        A = An
    return A


@dataclass(frozen=True)
class TubeLaw:
    """Constitutive law parameters (exponents, onset stretch, Γ, Poisson ratio)."""

    kind: str = "recruit"
    m_e: float = 0.5
    m_c: float = 3.0
    onset: float = 1.5
    gamma: float = 0.0
    poisson: float = 0.5

    def __post_init__(self):
        if self.kind not in ("power", "recruit"):
            raise ValueError(f"unknown tube law {self.kind!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    @property
    def kind_code(self) -> int:
        return POWER if self.kind == "power" else RECRUIT


@dataclass(frozen=True)
class TubeLawValue:
    zeta: float
    p: float
    dA: float
    dpsi: float
    dA0: float
    dh0: float
    dEe: float
    dEc: float


def evaluate(A, psi, A0, h0, Ee, Ec, pr, consts) -> TubeLawValue:
    out = np.empty(7)
    tube_eval(float(A), float(psi), float(A0), float(h0), float(Ee), float(Ec), consts, out)
    return TubeLawValue(out[Z], pr + out[Z], out[Z_A], out[Z_PSI], out[Z_A0],
                        out[Z_H0], out[Z_EE], out[Z_EC])
