"""Independent reference implementations used as test oracles.

Nothing here imports the package's kernels: each function re-derives its
result from first principles (closed forms, numpy/scipy quadrature, plain
loops) so that agreement is evidence rather than tautology.
"""

import math

import numpy as np
from scipy import integrate


def godunov_flux(qL: float, qR: float) -> float:
    """Godunov flux of ``q²/2``: min over [qL, qR] if qL <= qR, else max."""
    f = lambda q: 0.5 * q * q
    if qL <= qR:
        return 0.0 if qL <= 0.0 <= qR else min(f(qL), f(qR))
    return max(f(qL), f(qR))


def godunov_first_order(q: np.ndarray, left: float, dx: float, dt: float, steps: int) -> np.ndarray:
    """Classical first-order Godunov scheme for Burgers (no source), transparent right end."""
    q = q.copy()
    for _ in range(steps):
        ext = np.concatenate(([left], q, [q[-1]]))
        F = np.array([godunov_flux(a, b) for a, b in zip(ext[:-1], ext[1:])])
        q = q - dt / dx * (F[1:] - F[:-1])
    return q


def tube_zeta(A, psi, A0, h0, Ee, Ec, law="recruit", me=0.5, mc=3.0, rc=1.5, gamma=0.0, nu=0.5):
    K = lambda E: math.sqrt(math.pi) * h0 * E / ((1 - nu * nu) * math.sqrt(A0))
    r = A / A0
    coll = r ** mc - 1.0 if law == "power" else max(r - rc, 0.0) ** mc
    return K(Ee) * (r ** me - 1.0) + K(Ec) * coll + gamma * psi


def central_difference(f, x: float, rel: float = 1e-6) -> float:
    h = rel * max(abs(x), 1e-300)
    return (f(x + h) - f(x - h)) / (2 * h)


def sound_speed(A, A0, h0, Ee, Ec, rho=1.05, **law) -> float:
    dz = central_difference(lambda a: tube_zeta(a, 0.0, A0, h0, Ee, Ec, **law), A, 1e-5)
    return math.sqrt(A / rho * dz)


def invariant_integral(a: float, b: float, c) -> float:
    """``∫_a^b c(s)/s ds`` by adaptive quadrature."""
    val, _ = integrate.quad(lambda s: c(s) / s, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def quadratic_through(left: float, right: float, mean: float, xi: float) -> float:
    """Evaluate the unique quadratic on [0, 1] with given end values and mean."""
    # unknowns (a, b, c) of a + b x + c x²
    M = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [1.0, 0.5, 1.0 / 3.0]])
    a, b, c = np.linalg.solve(M, [left, right, mean])
    return a + b * xi + c * xi * xi


def trapezoid_anchor(qbar: float, dx: float) -> float:
    """Anchor C of C e^x on [0, dx] whose trapezoid average is ``qbar``."""
    return 2.0 * qbar / (1.0 + math.exp(dx))


def area_at_pressure(p: float, A0, h0, Ee, Ec, **law) -> float:
    """Tube-law inversion by plain bisection (zeta is increasing in A)."""
    lo, hi = 1e-6 * A0, 10.0 * A0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tube_zeta(mid, 0.0, A0, h0, Ee, Ec, **law) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
