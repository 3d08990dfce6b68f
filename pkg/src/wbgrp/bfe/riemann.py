"""Two-rarefaction approximate Riemann solver for the blood-flow system.

The star region is closed by the midpoint-rule rarefaction invariants

    u*L = uL + cL - (A*L/AL) cL,      u*R = uR - cR + (A*R/AR) cR,

with ``c`` the frozen-parameter sound speed of each side, mass-flux
continuity ``A*L u*L = A*R u*R`` (an ellipse linking A*R to A*L) and
continuity of total pressure ``p + rho u²/2`` across the standing wave.  The
last condition is a scalar equation in A*L solved by safeguarded Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..model import DOMAIN, OK, REGIME, RIEMANN
from .tubelaw import EPS, GAMMA, RHO, sound_speed, tube_zeta, tube_zeta_A

MAX_ITER = 100
TOL = 1e-13

# state layout
IA, IQ, IPSI, IA0, IH0, IEE, IEC, IPR = range(8)


@njit(cache=True)
def _side_pressure(A, psi, Q, c):
    return Q[IPR] + tube_zeta(A, psi, Q[IA0], Q[IH0], Q[IEE], Q[IEC], c)


@njit(cache=True)
def _right_area(x, sgn, aR, bR, kL, uL, cL):
    """A*R on branch ``sgn`` of the ellipse for A*L = x; NaN off the ellipse."""
    cc = kL * x * x - (uL + cL) * x
    disc = bR * bR - 4.0 * aR * cc
    if disc < 0.0:
        # roundoff at the tangent point
        if disc < -1e-12 * bR * bR:
            return np.nan, 0.0
        disc = 0.0
    sq = math.sqrt(disc)
    return (-bR + sgn * sq) / (2.0 * aR), sq


@njit(cache=True)
def _residual(x, sgn, QL, QR, c, AL, AR, uL, cL, aR, bR, kL, cR):
    """Total-pressure jump g(A*L), its derivative and A*R."""
    rho = c[RHO]
    eps = c[EPS]
    gam = c[GAMMA]
    AsR, sq = _right_area(x, sgn, aR, bR, kL, uL, cL)
    if not (AsR > 0.0):
        return np.nan, np.nan, AsR
    h1 = uL + cL - (x / AL) * cL
    h2 = bR + AsR * aR
    psiL = QL[IPSI] + (AL - x) / eps
    psiR = QR[IPSI] + (AR - AsR) / eps
    g = (_side_pressure(x, psiL, QL, c) + 0.5 * rho * h1 * h1) - (
        _side_pressure(AsR, psiR, QR, c) + 0.5 * rho * h2 * h2
    )
    if sq > 0.0:
        dAsR = -sgn * (2.0 * kL * x - (uL + cL)) / sq
    else:
        dAsR = np.inf
    dg = (
        tube_zeta_A(x, QL[IA0], QL[IH0], QL[IEE], QL[IEC], c) - gam / eps - rho * h1 * kL
        - (tube_zeta_A(AsR, QR[IA0], QR[IH0], QR[IEE], QR[IEC], c) - gam / eps + rho * h2 * aR) * dAsR
    )
    return g, dg, AsR


@njit(cache=True)
def two_rarefaction(QL, QR, c, SL, SR, info):
    """Star states of the Riemann problem (QL, QR).

    ``info`` receives ``[iterations, residual, lambda1(QL), lambda1(Q*L),
    lambda8(Q*R), lambda8(QR)]``.  Returns a status code.
    """
    v = QL.size
    same = True
    for k in range(v):
        if QL[k] != QR[k]:
            same = False
            break
    AL = QL[IA]
    AR = QR[IA]
    if not (AL > 0.0 and AR > 0.0):
        return DOMAIN
    rho = c[RHO]
    eps = c[EPS]
    gam = c[GAMMA]
    cL = sound_speed(AL, QL[IA0], QL[IH0], QL[IEE], QL[IEC], c)
    cR = sound_speed(AR, QR[IA0], QR[IH0], QR[IEE], QR[IEC], c)
    uL = QL[IQ] / AL
    uR = QR[IQ] / AR
    info[2] = uL - cL
    info[5] = uR + cR
    if not (abs(uL) < cL and abs(uR) < cR):
        return REGIME
    if same:
        for k in range(v):
            SL[k] = QL[k]
            SR[k] = QR[k]
        info[0] = 0.0
        info[1] = 0.0
        info[3] = info[2]
        info[4] = info[5]
        return OK

    kL = cL / AL
    aR = cR / AR
    bR = uR - cR
    pL0 = _side_pressure(AL, QL[IPSI], QL, c)
    pR0 = _side_pressure(AR, QR[IPSI], QR, c)
    scale = max(abs(pL0), abs(pR0), rho * cL * cL, rho * cR * cR)

    # The ellipse is closed: its upper branch (sgn = +1) holds the root for
    # ordinary data, and it joins the lower branch at the largest admissible
    # A*L.  A strong pressure rise to the right leaves g < 0 on the whole upper
    # branch and the root then sits on the lower one.
    xt = ((uL + cL) + math.sqrt((uL + cL) ** 2 + kL * bR * bR / aR)) / (2.0 * kL)
    gt, _, _ = _residual(xt, 1.0, QL, QR, c, AL, AR, uL, cL, aR, bR, kL, cR)
    if gt >= 0.0 or not (gt == gt):
        sgn = 1.0
        lo = 1e-3 * min(AL, AR)
        hi = min(10.0 * max(AL, AR), xt)
        x = 0.5 * (AL + AR)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
    else:
        sgn = -1.0
        lo = max((uL + cL) / kL, 0.0)
        hi = xt
        x = 0.5 * (lo + hi)
    converged = False
    g = np.nan
    it = 0
    AsR = np.nan
    for it in range(1, MAX_ITER + 1):
        g, dg, AsR = _residual(x, sgn, QL, QR, c, AL, AR, uL, cL, aR, bR, kL, cR)
        if not (AsR > 0.0):
            # off the ellipse (roundoff near the tangent) or at a vanishing
            # lower-branch area: both sit beyond the root
            if sgn > 0.0:
                hi = x
            else:
                lo = x
            x = 0.5 * (lo + hi)
            continue
        if abs(g) <= TOL * scale:
            # the tolerance is relative to rho c^2, so the star area can still
            # be off by many ulps; one more Newton step brings it to roundoff
            if dg != 0.0 and abs(dg) < np.inf:
                xn = x - g / dg
                gn, _, AsRn = _residual(xn, sgn, QL, QR, c, AL, AR, uL, cL, aR, bR, kL, cR)
                if AsRn > 0.0:
                    x = xn
                    AsR = AsRn
            converged = True
            break
        # g increases along the upper branch and decreases along the lower one
        if (g < 0.0) == (sgn > 0.0):
            lo = x
        else:
            hi = x
        xn = x - g / dg if (dg != 0.0 and dg == dg and abs(dg) < np.inf) else 0.5 * (lo + hi)
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4e-16 * x:
            # a collapsed bracket only counts if it straddles a root
            x = xn
            AsR, _ = _right_area(x, sgn, aR, bR, kL, uL, cL)
            converged = AsR > 0.0 and abs(g) <= 1e-8 * scale
            break
        x = xn
    info[0] = it
    info[1] = g
    if not converged:
        SL[IA] = x
        return RIEMANN
    if not (AsR > 0.0 and x > 0.0):
        return DOMAIN

    qs = x * (uL + cL - (x / AL) * cL)
    for k in range(v):
        SL[k] = QL[k]
        SR[k] = QR[k]
    SL[IA] = x
    SR[IA] = AsR
    SL[IQ] = qs
    SR[IQ] = qs
    SL[IPSI] = QL[IPSI] + (AL - x) / eps
    SR[IPSI] = QR[IPSI] + (AR - AsR) / eps
    csL = sound_speed(x, QL[IA0], QL[IH0], QL[IEE], QL[IEC], c)
    csR = sound_speed(AsR, QR[IA0], QR[IH0], QR[IEE], QR[IEC], c)
    info[3] = qs / x - csL
    info[4] = qs / AsR + csR
    if info[3] >= 0.0 or info[4] <= 0.0:
        return REGIME
    return OK


@dataclass(frozen=True)
class RiemannFan:
    """Star states and the four bounding wave speeds."""

    star_left: np.ndarray
    star_right: np.ndarray
    speeds: tuple[float, float, float, float]
    iterations: int
    residual: float
