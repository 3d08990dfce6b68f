"""Scenario configuration files.

A scenario is a flat, sectioned key-value file::

    [scenario]  name
    [model]     name (burgers | bfe), order, well_balanced
    [grid]      x_a, x_b, cells
    [time]      t_final, cfl, dt_max
    [ic]        kind, p_out (mmHg)
    [bc]        left, right
    [vessel]    length, a0, h0, ee, ec, pr, rho, mu, friction, eps, law, onset, gamma
    [gravity]   kind, value, samples
    [output]    snapshots, dir
    [reference] kind (analytic | fine), factor

Relative paths are resolved against the directory of the file.  Vessel
parameter profiles accept ``<number>``, ``taper <value>`` (linear from 1.1x
to 0.9x), ``linear <v0> <vL>`` or ``csv <path>``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from ..errors import ConfigError

MODELS = ("burgers", "bfe")
IC_KINDS = {"burgers": ("burgers-bump", "stationary"), "bfe": ("hydrostatic", "stationary", "rest")}
BC_KINDS = ("transparent", "value", "wall", "pressure", "area")
REFERENCE_FACTOR = 4


@dataclass(frozen=True)
class BoundarySpec:
    kind: str = "transparent"
    value: float = 0.0

    @classmethod
    def parse(cls, text: str, where: str) -> "BoundarySpec":
        parts = text.split()
        if not parts or parts[0] not in BC_KINDS:
            raise ConfigError(f"{where}: boundary must be one of {BC_KINDS}, got {text!r}")
        kind = parts[0]
        needs_value = kind in ("value", "pressure", "area")
        if len(parts) != (2 if needs_value else 1):
            raise ConfigError(f"{where}: {kind!r} boundary takes {'one value' if needs_value else 'no value'}")
        return cls(kind, _number(parts[1], where) if needs_value else 0.0)

    def __str__(self) -> str:
        return self.kind if self.kind in ("transparent", "wall") else f"{self.kind} {self.value!r}"


@dataclass(frozen=True)
class ProfileSpec:
    kind: str
    args: tuple[float, ...] = ()
    path: Path | None = None

    @classmethod
    def parse(cls, text: str, where: str, base: Path) -> "ProfileSpec":
        parts = text.split()
        if len(parts) == 1:
            return cls("constant", (_number(parts[0], where),))
        head, rest = parts[0], parts[1:]
        if head == "taper" and len(rest) == 1:
            return cls("taper", (_number(rest[0], where),))
        if head == "linear" and len(rest) == 2:
            return cls("linear", tuple(_number(r, where) for r in rest))
        if head == "csv" and len(rest) == 1:
            return cls("csv", (), (base / rest[0]).resolve())
        raise ConfigError(f"{where}: cannot parse profile {text!r}")


@dataclass(frozen=True)
class GravitySpec:
    kind: str = "constant"
    value: float = 0.0
    path: Path | None = None


@dataclass(frozen=True)
class VesselSpec:
    length: float
    A0: ProfileSpec
    h0: ProfileSpec
    Ee: ProfileSpec
    Ec: ProfileSpec
    pr: ProfileSpec
    gravity: GravitySpec
    rho: float = 1.05
    mu: float = 0.04
    friction: float | None = None
    eps: float = 1e-4
    law: str = "recruit"
    onset: float = 1.5
    gamma: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one run."""

    name: str
    model: str
    order: int
    well_balanced: bool
    x_a: float
    x_b: float
    cells: int
    t_final: float
    cfl: float
    ic: str
    left: BoundarySpec
    right: BoundarySpec
    dt_max: float = math.inf
    p_out: float = 60.0
    vessel: VesselSpec | None = None
    snapshots: tuple[float, ...] = ()
    out_dir: Path | None = None
    reference: str = "analytic"
    reference_factor: int = REFERENCE_FACTOR
    source: Path | None = None

    def __post_init__(self):
        validate(self)

    def with_overrides(self, *, order: int | None = None, cells: int | None = None,
                       well_balanced: bool | None = None, out_dir: Path | None = None,
                       t_final: float | None = None) -> "ScenarioConfig":
        changes = {k: v for k, v in dict(order=order, cells=cells, well_balanced=well_balanced,
                                         out_dir=out_dir, t_final=t_final).items() if v is not None}
        return replace(self, **changes)

    @property
    def snapshot_times(self) -> tuple[float, ...]:
        """Requested output times within the run, always ending at ``t_final``."""
        times = sorted({t for t in self.snapshots if 0.0 <= t < self.t_final} | {self.t_final})
        return tuple(times)


def validate(cfg: ScenarioConfig) -> None:
    if cfg.model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {cfg.model!r}")
    if cfg.order not in (2, 3):
        raise ConfigError(f"order must be 2 or 3, got {cfg.order}")
    if int(cfg.cells) != cfg.cells or cfg.cells < 4:
        raise ConfigError(f"need at least 4 cells, got {cfg.cells}")
    if not cfg.x_b > cfg.x_a:
        raise ConfigError("grid requires x_b > x_a")
    if not 0.0 < cfg.cfl <= 1.0:
        raise ConfigError(f"CFL must lie in (0, 1], got {cfg.cfl}")
    # a zero-length run is allowed: it just projects the initial condition
    if not cfg.t_final >= 0.0 or not math.isfinite(cfg.t_final):
        raise ConfigError(f"t_final must be finite and non-negative, got {cfg.t_final}")
    if not cfg.dt_max > 0.0:
        raise ConfigError("dt_max must be positive")
    if cfg.ic not in IC_KINDS[cfg.model]:
        raise ConfigError(f"initial condition for {cfg.model} must be one of {IC_KINDS[cfg.model]}")
    if cfg.reference not in ("analytic", "fine"):
        raise ConfigError(f"reference must be 'analytic' or 'fine', got {cfg.reference!r}")
    if cfg.reference_factor != REFERENCE_FACTOR:
        raise ConfigError(f"fine-mesh reference factor is fixed at {REFERENCE_FACTOR}")
    for side, bc in (("left", cfg.left), ("right", cfg.right)):
        if cfg.model == "burgers" and bc.kind not in ("transparent", "value"):
            raise ConfigError(f"{side} boundary {bc.kind!r} is not available for burgers")
        if cfg.model == "bfe" and bc.kind == "value":
            raise ConfigError(f"{side} boundary 'value' is not available for bfe")
    if cfg.model == "bfe":
        if cfg.vessel is None:
            raise ConfigError("bfe scenarios need a [vessel] section")
        if cfg.x_a != 0.0 or cfg.x_b != cfg.vessel.length:
            raise ConfigError("bfe grid must span [0, vessel length]")


def _number(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, origin: str):
        self.p = parser
        self.origin = origin

    def get(self, section: str, key: str, default=None) -> str:
        if self.p.has_option(section, key):
            return self.p.get(section, key).strip()
        if default is None:
            raise ConfigError(f"{self.origin}: missing [{section}] {key}")
        return default

    def num(self, section: str, key: str, default: float | None = None) -> float:
        raw = self.get(section, key, None if default is None else repr(default))
        return _number(raw, f"{self.origin} [{section}] {key}")

    def flag(self, section: str, key: str) -> bool:
        try:
            return self.p.getboolean(section, key)
        except (ValueError, configparser.NoOptionError, configparser.NoSectionError):
            raise ConfigError(f"{self.origin}: [{section}] {key} must be on/off") from None


def parse_config(text: str, base: Path | None = None, origin: str = "<config>") -> ScenarioConfig:
    base = Path(".") if base is None else base
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    r = _Reader(parser, origin)
    model = r.get("model", "name")
    vessel = _vessel(r, base) if model == "bfe" else None
    out_dir = r.get("output", "dir", "")
    snaps = r.get("output", "snapshots", "")
    return ScenarioConfig(
        name=r.get("scenario", "name"),
        model=model,
        order=int(r.num("model", "order")),
        well_balanced=r.flag("model", "well_balanced"),
        x_a=r.num("grid", "x_a"),
        x_b=r.num("grid", "x_b"),
        cells=int(r.num("grid", "cells")),
        t_final=r.num("time", "t_final"),
        cfl=r.num("time", "cfl"),
        dt_max=r.num("time", "dt_max", math.inf),
        ic=r.get("ic", "kind"),
        p_out=r.num("ic", "p_out", 60.0),
        left=BoundarySpec.parse(r.get("bc", "left"), f"{origin} [bc] left"),
        right=BoundarySpec.parse(r.get("bc", "right"), f"{origin} [bc] right"),
        vessel=vessel,
        snapshots=tuple(_number(s, f"{origin} [output] snapshots") for s in snaps.replace(",", " ").split()),
        out_dir=(base / out_dir).resolve() if out_dir else None,
        reference=r.get("reference", "kind", "analytic"),
        reference_factor=int(r.num("reference", "factor", REFERENCE_FACTOR)),
        source=None,
    )


def _vessel(r: _Reader, base: Path) -> VesselSpec:
    def prof(key: str, default: str | None = None) -> ProfileSpec:
        return ProfileSpec.parse(r.get("vessel", key, default), f"{r.origin} [vessel] {key}", base)

    kind = r.get("gravity", "kind", "constant")
    samples = r.get("gravity", "samples", "")
    gravity = GravitySpec(kind, r.num("gravity", "value", 0.0), (base / samples).resolve() if samples else None)
    if kind == "polyline" and gravity.path is None:
        raise ConfigError(f"{r.origin}: polyline gravity needs [gravity] samples")
    friction = r.get("vessel", "friction", "")
    return VesselSpec(
        length=r.num("vessel", "length"),
        A0=prof("a0"), h0=prof("h0"), Ee=prof("ee"), Ec=prof("ec"), pr=prof("pr", "0"),
        gravity=gravity,
        rho=r.num("vessel", "rho", 1.05),
        mu=r.num("vessel", "mu", 0.04),
        friction=_number(friction, f"{r.origin} [vessel] friction") if friction else None,
        eps=r.num("vessel", "eps", 1e-4),
        law=r.get("vessel", "law", "recruit"),
        onset=r.num("vessel", "onset", 1.5),
        gamma=r.num("vessel", "gamma", 0.0),
    )


BUILTIN = ("burgers-steady", "burgers-stationary", "bfe-s1", "bfe-s2", "bfe-s3", "deadman")


def load_config(spec: str | Path) -> ScenarioConfig:
    """Read a config file, or a built-in scenario by name."""
    path = Path(spec)
    if path.is_file():
        text = path.read_text()
        base = path.resolve().parent
        origin = str(path)
    elif str(spec) in BUILTIN:
        res = resources.files("wbgrp") / "data" / f"{spec}.ini"
        text = res.read_text()
        base = Path(str(res)).parent
        origin = f"builtin:{spec}"
    else:
        raise ConfigError(f"no config file or built-in scenario named {str(spec)!r}")
    cfg = parse_config(text, base, origin)
    return replace(cfg, source=path if path.is_file() else None)
