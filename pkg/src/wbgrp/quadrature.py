"""Node sets, weights and Runge-Kutta tableaux for orders 2 and 3.

Both the spatial and temporal rules use endpoint (Lobatto-type) nodes:
trapezoid on {0, 1} for P=2 and Simpson on {0, 1/2, 1} for P=3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError

SUPPORTED_ORDERS = (2, 3)


def check_order(P: int) -> int:
    if P not in SUPPORTED_ORDERS:
        raise UsageError(f"order must be 2 or 3, got {P!r}")
    return int(P)


def nodes(P: int) -> np.ndarray:
    """Reference nodes on [0, 1]."""
    check_order(P)
    return np.linspace(0.0, 1.0, P)


def weights(P: int) -> np.ndarray:
    """Quadrature weights on [0, 1] matching :func:`nodes`."""
    check_order(P)
    if P == 2:
        return np.array([0.5, 0.5])
    return np.array([1.0, 4.0, 1.0]) / 6.0


@dataclass(frozen=True)
class Tableau:
    """Explicit Runge-Kutta tableau, ``c`` given in units of ``1/substeps`` of h.

    ``substeps`` is the common denominator of the abscissae, so stage ``j``
    of a step starting at fine index ``k`` sits at fine index
    ``k + cidx[j]`` on a grid of spacing ``h / substeps``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cidx: np.ndarray
    substeps: int


def tableau(P: int) -> Tableau:
    """Heun for P=2, Kutta's third-order rule for P=3."""
    check_order(P)
    if P == 2:
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([0.5, 0.5])
        c = np.array([0.0, 1.0])
        return Tableau(a, b, c, np.array([0, 1], dtype=np.int64), 1)
    a = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [-1.0, 2.0, 0.0]])
    b = np.array([1.0, 4.0, 1.0]) / 6.0
    c = np.array([0.0, 0.5, 1.0])
    return Tableau(a, b, c, np.array([0, 1, 2], dtype=np.int64), 2)


def fine_points_per_cell(P: int) -> int:
    """Number of fine sub-intervals per cell used to place RK stage points."""
    return (P - 1) * tableau(P).substeps


def node_fine_index(P: int) -> np.ndarray:
    """Fine-grid offsets of the P spatial nodes inside a cell."""
    return np.arange(P, dtype=np.int64) * tableau(P).substeps


def lagrange_matrix(xi: np.ndarray, at: np.ndarray) -> np.ndarray:
    """Matrix ``L[k, j] = l_j(at[k])`` of Lagrange basis values."""
    xi = np.asarray(xi, dtype=float)
    at = np.atleast_1d(np.asarray(at, dtype=float))
    out = np.ones((at.size, xi.size))
    for j in range(xi.size):
        for m in range(xi.size):
            if m != j:
                out[:, j] *= (at - xi[m]) / (xi[j] - xi[m])
    return out


def lagrange_derivative_matrix(xi: np.ndarray, at: np.ndarray | None = None) -> np.ndarray:
    """Matrix ``D[k, j] = l_j'(at[k])``; ``at`` defaults to the nodes."""
    xi = np.asarray(xi, dtype=float)
    at = xi if at is None else np.atleast_1d(np.asarray(at, dtype=float))
    n = xi.size
    out = np.zeros((at.size, n))
    for j in range(n):
        for m in range(n):
            if m == j:
                continue
            term = np.full(at.size, 1.0 / (xi[j] - xi[m]))
            for r in range(n):
                if r != j and r != m:
                    term *= (at - xi[r]) / (xi[j] - xi[r])
            out[:, j] += term
    return out
