"""Spatial profiles for vessel parameters and the axial gravity projection."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from .tubelaw import TubeLaw

G_EARTH = 981.0
MMHG = 1333.22  # dyn/cm^2
PASCAL = 10.0  # dyn/cm^2


class Profile:
    """A continuous function on ``[0, L]`` with derivative and antiderivative."""

    breakpoints: tuple[float, ...] = ()

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def antiderivative(self, x):
        raise NotImplementedError

    def integral(self, a, b):
        return self.antiderivative(b) - self.antiderivative(a)

    def bound(self) -> float:
        """Sup of ``|f|``; exact for the profile kinds below."""
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Profile):
    value: float

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def antiderivative(self, x):
        return self.value * np.asarray(x, dtype=float)

    def bound(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class Polyline(Profile):
    """Continuous piecewise-linear interpolant of ``(x, value)`` samples."""

    x: tuple[float, ...]
    value: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.x, dtype=float)
        if xs.size < 2 or xs.size != len(self.value):
            raise ConfigError("polyline needs at least two (x, value) samples")
        if np.any(np.diff(xs) <= 0):
            raise ConfigError("polyline abscissae must be strictly increasing")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(self.value)):
            raise ConfigError("polyline samples must be finite")

    @property
    def breakpoints(self):
        return tuple(self.x)

    def _arrays(self):
        return np.asarray(self.x, dtype=float), np.asarray(self.value, dtype=float)

    def __call__(self, x):
        xs, vs = self._arrays()
        return np.interp(np.asarray(x, dtype=float), xs, vs)

    def _segment(self, x):
        xs, _ = self._arrays()
        return np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)

    def derivative(self, x):
        # one-sided (right) slope at the vertices
        xs, vs = self._arrays()
        slopes = np.diff(vs) / np.diff(xs)
        return slopes[self._segment(np.asarray(x, dtype=float))]

    def antiderivative(self, x):
        xs, vs = self._arrays()
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (vs[1:] + vs[:-1]) * np.diff(xs))])
        k = self._segment(x)
        return cum[k] + 0.5 * (vs[k] + self(x)) * (x - xs[k])

    def bound(self) -> float:
        return float(np.abs(self.value).max())


@dataclass(frozen=True)
class Linear(Profile):
    """Linear taper from ``v0`` at ``x0`` to ``v1`` at ``x1``."""

    x0: float
    v0: float
    x1: float
    v1: float

    @property
    def slope(self) -> float:
        return (self.v1 - self.v0) / (self.x1 - self.x0)

    def __call__(self, x):
        return self.v0 + self.slope * (np.asarray(x, dtype=float) - self.x0)

    def derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.slope)

    def antiderivative(self, x):
        s = np.asarray(x, dtype=float) - self.x0
        return self.v0 * s + 0.5 * self.slope * s * s

    def bound(self) -> float:
        return max(abs(self.v0), abs(self.v1))


@dataclass(frozen=True)
class SmoothGravity(Profile):
    """``|g| (exp(-x) - exp(-L))``: full gravity at the inlet, zero at the outlet."""

    g_abs: float
    length: float

    def __call__(self, x):
        return self.g_abs * (np.exp(-np.asarray(x, dtype=float)) - np.exp(-self.length))

    def derivative(self, x):
        return -self.g_abs * np.exp(-np.asarray(x, dtype=float))

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.g_abs * (-np.exp(-x) - np.exp(-self.length) * x)

    def bound(self) -> float:
        return abs(self.g_abs) * (1.0 - np.exp(-self.length))


def load_samples_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``x,value`` samples from a CSV file with a header row."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read samples from {path}: {exc}") from exc
    if len(rows) < 3:
        raise ConfigError(f"{path}: need a header row and at least two samples")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["x", "value"]:
        raise ConfigError(f"{path}: header must be 'x,value', got {rows[0]}")
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows[1:] if r], dtype=float)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"{path}: malformed sample row") from exc
    return data[:, 0], data[:, 1]


def polyline_on(xs, vs, length: float) -> Polyline:
    """Polyline that must cover exactly ``[0, length]``."""
    xs = np.asarray(xs, dtype=float)
    if xs.size < 2 or xs[0] != 0.0 or not np.isclose(xs[-1], length, rtol=0, atol=1e-12 * max(1.0, length)):
        raise ConfigError(f"polyline samples must span [0, {length}]")
    if np.any(xs < 0) or np.any(xs > length * (1 + 1e-12)):
        raise ConfigError("polyline samples outside the vessel")
    return Polyline(tuple(xs), tuple(np.asarray(vs, dtype=float)))


def gravity_profile(kind: str, data, length: float | None = None) -> Profile:
    """Axial gravity projection ``g_x(x)``.

    Parameters
    ----------
    kind
        ``"constant"``, ``"smooth"`` or ``"polyline"``.
    data
        The constant value; ``|g|`` for the smooth profile; ``(xs, values)``
        or a CSV path for the polyline.
    length
        Vessel length.  Required for ``smooth`` and ``polyline``.
    """
    if kind == "constant":
        return Constant(float(data))
    if length is None or length <= 0:
        raise ConfigError(f"gravity kind {kind!r} needs a positive vessel length")
    if kind == "smooth":
        return SmoothGravity(float(data), float(length))
    if kind == "polyline":
        if isinstance(data, (str, Path)):
            xs, vs = load_samples_csv(data)
        else:
            xs, vs = data
        if np.abs(np.asarray(vs, dtype=float)).max() > G_EARTH * (1 + 1e-12):
            raise ConfigError(f"polyline gravity exceeds |g| = {G_EARTH}")
        return polyline_on(xs, vs, length)
    raise ConfigError(f"unknown gravity kind {kind!r}")


def taper(value: float, length: float, start: float = 1.1, end: float = 0.9) -> Linear:
    return Linear(0.0, start * value, length, end * value)


@dataclass(frozen=True)
class VesselProfile:
    """Wall parameters, gravity and fluid constants of a single vessel (CGS)."""

    length: float
    A0: Profile
    h0: Profile
    Ee: Profile
    Ec: Profile
    pr: Profile = field(default_factory=lambda: Constant(0.0))
    gravity: Profile = field(default_factory=lambda: Constant(0.0))
    rho: float = 1.05
    mu: float = 0.04
    friction: float | None = None
    eps: float = 1e-4
    law: TubeLaw = field(default_factory=TubeLaw)

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigError("vessel length must be positive")
        if self.rho <= 0 or self.eps <= 0:
            raise ConfigError("density and relaxation time must be positive")
        if self.R >= 0:
            raise ConfigError("friction coefficient must be negative")

    @property
    def R(self) -> float:
        """Friction coefficient; Poiseuille ``-8 pi mu / rho`` unless given."""
        if self.friction is not None:
            return float(self.friction)
        return -8.0 * np.pi * self.mu / self.rho

    @property
    def parameters(self) -> tuple[Profile, ...]:
        return (self.A0, self.h0, self.Ee, self.Ec, self.pr)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        pts = set()
        for prof in (*self.parameters, self.gravity):
            pts.update(b for b in prof.breakpoints if 0.0 < b < self.length)
        return tuple(sorted(pts))

    def with_gravity(self, gravity: Profile) -> "VesselProfile":
        from dataclasses import replace

        return replace(self, gravity=gravity)
