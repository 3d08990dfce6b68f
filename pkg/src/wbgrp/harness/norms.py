"""Discrete error norms and empirical convergence orders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NORMS = ("L1", "L2", "Linf")


def error_norms(error, dx: float) -> tuple[float, float, float]:
    """``(L1, L2, Linf)`` of cell-average errors with ``dx`` weighting."""
    e = np.abs(np.asarray(error, dtype=float))
    linf = float(e.max())
    # scaled by Linf so tiny errors do not underflow when squared
    l2 = linf * math.sqrt(((e / linf) ** 2).sum() * dx) if linf > 0 else 0.0
    return float(e.sum() * dx), l2, linf


def norms_consistent(l1: float, l2: float, linf: float, length: float, rtol: float = 1e-12) -> bool:
    """``Linf >= L2/sqrt|Ω| >= L1/|Ω|``, which holds for any error vector."""
    a, b, c = linf, l2 / math.sqrt(length), l1 / length
    return a >= b * (1 - rtol) and b >= c * (1 - rtol)


def orders(errors) -> np.ndarray:
    """``log2(E_k / E_{k+1})`` between successive refinements."""
    e = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log2(e[:-1] / e[1:])


@dataclass
class ErrorReport:
    """Errors of a refinement study, one row per mesh.

    ``errors[name]`` has shape ``(levels, 3)`` holding L1, L2 and Linf.
    """

    scenario: str
    order: int
    well_balanced: bool
    cells: list[int] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)
    errors: dict[str, list[tuple[float, float, float]]] = field(default_factory=dict)
    length: float = 1.0

    def add(self, cells: int, seconds: float, norms: dict[str, tuple[float, float, float]]) -> None:
        self.cells.append(int(cells))
        self.seconds.append(float(seconds))
        for name, triple in norms.items():
            self.errors.setdefault(name, []).append(tuple(triple))

    def norm(self, variable: str, kind: str = "L1") -> np.ndarray:
        return np.array(self.errors[variable])[:, NORMS.index(kind)]

    def orders(self, variable: str, kind: str = "L1") -> np.ndarray:
        return orders(self.norm(variable, kind))

    def consistent(self) -> bool:
        return all(norms_consistent(*row, self.length) for rows in self.errors.values() for row in rows)

    def header(self) -> list[str]:
        cols = ["cells", "seconds"]
        for name in self.errors:
            cols += [f"{name}_{k}" for k in NORMS] + [f"{name}_order_{k}" for k in NORMS]
        return cols

    def rows(self) -> list[list[float]]:
        out = []
        for i, n in enumerate(self.cells):
            row = [n, self.seconds[i]]
            for name in self.errors:
                row += list(self.errors[name][i])
                row += [self.orders(name, k)[i - 1] if i else math.nan for k in NORMS]
            out.append(row)
        return out

    def table(self) -> str:
        """Human-readable summary in the layout of a convergence table."""
        lines = [f"{self.scenario}  P={self.order}  WB={'on' if self.well_balanced else 'off'}"]
        head = f"{'N':>6} {'sec':>8}"
        for name in self.errors:
            head += "".join(f" {name + ' ' + k:>12}" for k in NORMS) + f" {'ord':>5}"
        lines.append(head)
        for i, n in enumerate(self.cells):
            s = f"{n:>6} {self.seconds[i]:>8.3f}"
            for name in self.errors:
                s += "".join(f" {v:>12.3e}" for v in self.errors[name][i])
                s += f" {self.orders(name)[i - 1]:>5.2f}" if i else f" {'':>5}"
            lines.append(s)
        return "\n".join(lines)
