"""Run orchestration: single runs, refinement studies, drift checks and timings."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bfe.profiles import MMHG
from ..errors import ConfigError
from ..model import Grid
from ..solver import SolverState, StepReport
from ..stationary import match_cell_average, rk_march
from .config import REFERENCE_FACTOR, ScenarioConfig
from .norms import ErrorReport, error_norms
from .scenarios import Setup, build

log = logging.getLogger("wbgrp")


@dataclass
class RunResult:
    setup: Setup
    state: SolverState
    snapshots: list[Path] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def Qbar(self) -> np.ndarray:
        return self.state.Qbar

    @property
    def reports(self) -> list[StepReport]:
        return self.state.history


def format_time(t: float) -> str:
    return f"{t:.10g}"


def snapshot_table(setup: Setup, Qbar: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Column names and values of one output snapshot."""
    model = setup.model
    names = ["x_center", *model.component_names]
    cols = [setup.grid.centers, *Qbar.T]
    if setup.config.model == "bfe":
        derived = model.derived(Qbar)
        names += ["u", "c", "p"]
        cols += [derived["u"], derived["c"], derived["p"]]
    return names, np.column_stack(cols)


def write_csv(path: Path, names: list[str], values: np.ndarray) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, values, fmt="%.17g", delimiter=",", header=",".join(names), comments="")
    return path


def run(cfg: ScenarioConfig, out_dir: Path | None = None) -> RunResult:
    """Advance a scenario to ``t_final``, writing one CSV per snapshot time."""
    setup = build(cfg)
    out_dir = out_dir if out_dir is not None else cfg.out_dir
    result = RunResult(setup, setup.state)
    for t in cfg.snapshot_times:
        t0 = time.perf_counter()
        setup.solver.advance(result.state, t)
        result.seconds += time.perf_counter() - t0
        log.info("snapshot", extra={"data": {"scenario": cfg.name, "t": result.state.t,
                                             "steps": result.state.steps}})
        if out_dir is not None:
            names, values = snapshot_table(setup, result.state.Qbar)
            path = Path(out_dir) / f"{cfg.name}_t{format_time(t)}.csv"
            result.snapshots.append(write_csv(path, names, values))
    return result


def _timed_run(cfg: ScenarioConfig) -> tuple[np.ndarray, float]:
    setup = build(cfg)
    t0 = time.perf_counter()
    setup.solver.advance(setup.state, cfg.t_final, record=False)
    return setup.state.Qbar, time.perf_counter() - t0


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def coarsen(Qbar: np.ndarray, factor: int) -> np.ndarray:
    """Average blocks of ``factor`` fine cells onto the coarse grid."""
    n, v = Qbar.shape
    return Qbar.reshape(n // factor, factor, v).mean(axis=1)


def converge(cfg: ScenarioConfig, refinements: int = 4, threads: int = 1) -> ErrorReport:
    """Errors at ``t_final`` on N, 2N, ..., 2^(k-1) N cells."""
    if refinements < 1:
        raise ConfigError("need at least one refinement level")
    levels = [cfg.with_overrides(cells=cfg.cells * 2 ** k) for k in range(refinements)]
    jobs = list(levels)
    if cfg.reference == "fine":
        jobs.append(cfg.with_overrides(cells=levels[-1].cells * REFERENCE_FACTOR))
    results = _map(_timed_run, jobs, threads)
    setup = build(cfg)
    report = ErrorReport(cfg.name, cfg.order, cfg.well_balanced, length=setup.grid.length)
    fine = results[-1][0] if cfg.reference == "fine" else None
    for level, (Qbar, seconds) in zip(levels, results):
        grid = Grid(cfg.x_a, cfg.x_b, level.cells)
        if fine is None:
            ref = setup.exact(grid)
        else:
            ref = coarsen(fine, fine.shape[0] // level.cells)
        norms = {name: error_norms(Qbar[:, k] - ref[:, k], grid.dx) for name, k in setup.variables}
        report.add(level.cells, seconds, norms)
        log.info("level", extra={"data": {"scenario": cfg.name, "cells": level.cells,
                                          "seconds": seconds, "errors": norms}})
    return report


@dataclass
class DriftReport:
    """Largest deviation from the initial cell averages over a run."""

    scenario: str
    steps: int
    t: float
    drift: dict[str, float]

    def rows(self) -> list[tuple[str, float]]:
        return list(self.drift.items())


def wb_check(cfg: ScenarioConfig, steps: int | None = None, t_final: float | None = None) -> DriftReport:
    """Max ``|Q_i^n - Q_i^0|`` over all cells and steps, per variable.

    Runs ``steps`` steps, or until ``t_final`` (default: the config's) when
    ``steps`` is not given.  BFE reports also carry the pressure drift in mmHg.
    """
    setup = build(cfg)
    state = setup.state
    Q0 = state.Qbar.copy()
    bfe = cfg.model == "bfe"
    p0 = setup.model.pressure(Q0) if bfe else None
    drift = {name: 0.0 for name, _ in setup.variables}
    if bfe:
        drift["p_mmHg"] = 0.0
    end = np.inf if steps is not None else (cfg.t_final if t_final is None else t_final)
    remaining = steps if steps is not None else np.iinfo(np.int64).max
    while remaining > 0 and state.t < end:
        setup.solver.advance(state, end, max_steps=1, record=False)
        remaining -= 1
        for name, k in setup.variables:
            drift[name] = max(drift[name], float(np.abs(state.Qbar[:, k] - Q0[:, k]).max()))
        if bfe:
            dp = np.abs(setup.model.pressure(state.Qbar) - p0).max() / MMHG
            drift["p_mmHg"] = max(drift["p_mmHg"], float(dp))
    log.info("wb-check", extra={"data": {"scenario": cfg.name, "steps": state.steps, "t": state.t,
                                         "drift": drift}})
    return DriftReport(cfg.name, state.steps, state.t, drift)


@dataclass
class BenchRow:
    scenario: str
    order: int
    well_balanced: bool
    cells: int
    seconds: float
    l2: dict[str, float]


def bench(configs: list[ScenarioConfig]) -> list[BenchRow]:
    """Wall time of the time loop and L2 error for each config, on one thread.

    Each model and order is stepped briefly beforehand so compilation is not timed.
    """
    import numba

    numba.set_num_threads(1)
    rows = []
    warmed = set()
    for cfg in configs:
        key = (cfg.model, cfg.order)
        if key not in warmed:
            warm = build(cfg)
            warm.solver.advance(warm.state, cfg.t_final, max_steps=2, record=False)
            warmed.add(key)
        setup = build(cfg)
        t0 = time.perf_counter()
        setup.solver.advance(setup.state, cfg.t_final, record=False)
        seconds = time.perf_counter() - t0
        if setup.exact is None:
            raise ConfigError("bench needs an analytic reference")
        ref = setup.exact(setup.grid)
        l2 = {name: error_norms(setup.state.Qbar[:, k] - ref[:, k], setup.grid.dx)[1]
              for name, k in setup.variables}
        rows.append(BenchRow(cfg.name, cfg.order, cfg.well_balanced, cfg.cells, seconds, l2))
        log.info("bench", extra={"data": {"scenario": cfg.name, "cells": cfg.cells,
                                          "wb": cfg.well_balanced, "seconds": seconds, "l2": l2}})
    return rows


def hydrostatic_residual(setup: Setup, Qbar: np.ndarray, rel_step: float = 1e-4) -> float:
    """Largest ``|dp/dx - rho g_x|`` at cell centers, relative to ``rho max|g_x|``.

    ``dp/dx`` is a central difference along the stationary profile that
    reproduces each cell average, marched a distance ``rel_step * dx`` either
    side of the center.
    """
    model, grid, P = setup.model, setup.grid, setup.config.order
    prof = model.profile
    dx = grid.dx
    delta = rel_step * dx
    centers = grid.centers
    rho_g = prof.rho * prof.gravity(centers)
    scale = prof.rho * max(float(np.abs(prof.gravity(grid.fine(8))).max()), 1e-300)
    worst = 0.0
    for i, xc in enumerate(centers):
        sp = match_cell_average(model, (grid.interfaces[i], dx), Qbar[i], P)
        Qc = sp.nodes[1] if P == 3 else rk_march(model, sp.x[0], sp.nodes[0], 0.5 * dx, P)
        plus = rk_march(model, xc, Qc, delta, P)
        minus = rk_march(model, xc, Qc, -delta, P)
        dpdx = (model.pressure(plus)[0] - model.pressure(minus)[0]) / (2 * delta)
        worst = max(worst, abs(dpdx - rho_g[i]) / scale)
    return worst
