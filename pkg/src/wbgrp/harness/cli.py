"""Command-line entry point: ``wbgrp {run,converge,wb-check,bench}``.

Exit codes are 0 on success, 2 for configuration or usage errors and 3 when
the solver fails.  Diagnostics go to stderr as JSON lines.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from ..errors import ConfigError, SolverFailure, UsageError
from .config import BUILTIN, ScenarioConfig, load_config
from .runner import bench, converge, run, wb_check, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

log = logging.getLogger("wbgrp")


class JSONLines(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        entry = {"level": record.levelname.lower(), "event": record.getMessage()}
        entry.update(getattr(record, "data", {}))
        return json.dumps(entry, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    try:
        return obj.tolist()
    except AttributeError:
        return str(obj)


def _configure_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JSONLines())
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append", required=True, metavar="PATH",
                        help=f"scenario file or built-in name ({', '.join(BUILTIN)})")
    common.add_argument("--order", type=int, choices=(2, 3))
    common.add_argument("--cells", type=int, metavar="N")
    common.add_argument("--wb", choices=("on", "off"))
    common.add_argument("--out", type=Path, metavar="DIR")
    common.add_argument("--threads", type=int, default=1, metavar="K")
    common.add_argument("--quiet", action="store_true", help="only log warnings")

    p = argparse.ArgumentParser(prog="wbgrp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("run", parents=[common], help="advance a scenario and write CSV snapshots")
    c = sub.add_parser("converge", parents=[common], help="refinement study against a reference")
    c.add_argument("--refinements", type=int, default=4, metavar="K")
    w = sub.add_parser("wb-check", parents=[common], help="drift of a stationary start")
    w.add_argument("--steps", type=int, metavar="N", help="number of steps (default: run to t_final)")
    b = sub.add_parser("bench", parents=[common], help="time vs L2 error on one thread")
    b.add_argument("--refinements", type=int, default=4, metavar="K")
    b.add_argument("--both", action="store_true", help="time WB on and off for every mesh")
    return p


def _configs(args) -> list[ScenarioConfig]:
    wb = None if args.wb is None else args.wb == "on"
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return [load_config(c).with_overrides(order=args.order, cells=args.cells, well_balanced=wb)
            for c in args.config]


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    return args.out or cfg.out_dir or Path("out")


def _single(args) -> ScenarioConfig:
    cfgs = _configs(args)
    if len(cfgs) != 1:
        raise UsageError(f"{args.verb} takes exactly one --config")
    return cfgs[0]


def cmd_run(args) -> None:
    cfg = _single(args)
    result = run(cfg, _out_dir(args, cfg))
    for path in result.snapshots:
        print(path)


def cmd_converge(args) -> None:
    cfg = _single(args)
    report = converge(cfg, args.refinements, args.threads)
    wb = "on" if cfg.well_balanced else "off"
    path = _out_dir(args, cfg) / f"{cfg.name}_P{cfg.order}_wb{wb}_converge.csv"
    write_csv(path, report.header(), report.rows())
    print(report.table())
    print(path)


def cmd_wb_check(args) -> None:
    cfg = _single(args)
    report = wb_check(cfg, steps=args.steps)
    print(f"{report.scenario}: {report.steps} steps, t={report.t:.6g}")
    for name, value in report.rows():
        print(f"  max drift {name:<7} {value:.3e}")


def cmd_bench(args) -> None:
    jobs = []
    for cfg in _configs(args):
        flags = (True, False) if args.both else (cfg.well_balanced,)
        for k in range(args.refinements):
            for wb in flags:
                jobs.append(cfg.with_overrides(cells=cfg.cells * 2 ** k, well_balanced=wb))
    if len(jobs) < 2:
        raise UsageError("bench needs at least two runs (use --refinements >= 2 or --both)")
    rows = bench(jobs)
    variables = list(rows[0].l2)
    names = ["scenario", "order", "wb", "cells", "seconds", *[f"L2_{v}" for v in variables]]
    path = _out_dir(args, jobs[0]) / "bench.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for r in rows:
            vals = [r.scenario, str(r.order), "on" if r.well_balanced else "off", str(r.cells),
                    f"{r.seconds:.6g}", *[f"{r.l2[v]:.17g}" for v in variables]]
            fh.write(",".join(vals) + "\n")
            print(",".join(vals))
    print(path)


COMMANDS = {"run": cmd_run, "converge": cmd_converge, "wb-check": cmd_wb_check, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(not args.quiet)
    try:
        COMMANDS[args.verb](args)
    except (ConfigError, UsageError) as exc:
        log.error("config", extra={"data": {"error": type(exc).__name__, "message": str(exc)}})
        return EXIT_CONFIG
    except SolverFailure as exc:
        log.error("solver-failure", extra={"data": {"error": type(exc).__name__, "message": str(exc),
                                                    "location": exc.location, **exc.info}})
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
