"""ptqed command-line entry point.

    ptqed <experiment> --config FILE [--out DIR] [--format csv|json]
          [--jobs N] [--deterministic] [--emit-plot-script]

Exit codes: 0 success, 1 configuration / validation error (nothing written),
2 numerical failure (the error text goes to ``<out>/<experiment>.err``).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..qcore import StateError
from .config import ConfigError, RunConfig, load_config
from .experiments import EXPERIMENTS, run_task
from .table import emit, plot_script

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

NUMERICAL_ERRORS = (ArithmeticError, RuntimeError, StateError, np.linalg.LinAlgError)


def _epilog() -> str:
    lines = ["experiments:"]
    for name, exp in EXPERIMENTS.items():
        lines.append(f"  {name:14s} {exp.summary}")
    lines.append("")
    lines.append("exit codes: 0 success, 1 configuration error, 2 numerical failure")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptqed",
        description="Loss/gain resonator-pair simulations: drives, dynamics, spectra, transmission.",
        epilog=_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("experiment", choices=list(EXPERIMENTS))
    parser.add_argument("--config", required=True, help="flat key = value configuration file")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--format", choices=("csv", "json"), help="overrides output.format")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes for sweeps (default: available cores)")
    parser.add_argument("--deterministic", action="store_true",
                        help="omit wall-clock time so repeated runs are byte identical")
    parser.add_argument("--emit-plot-script", action="store_true",
                        help="also write a matplotlib script next to each CSV")
    parser.add_argument("--version", action="version", version=f"ptqed {__version__}")
    return parser


def _check_writable(out_dir: Path) -> None:
    probe = out_dir
    while not probe.exists():
        if probe.parent == probe:
            break
        probe = probe.parent
    if not probe.is_dir() or not os.access(probe, os.W_OK | os.X_OK):
        raise ConfigError(f"output directory {out_dir} is not writable")


def _map_tasks(tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_task(t) for t in tasks]
    workers = min(jobs, len(tasks))
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks, chunksize=chunk))


def run(cfg: RunConfig, jobs: int = 1, deterministic: bool = False, stderr=sys.stderr) -> int:
    """Validate, compute and write all tables of one experiment; returns the exit code."""
    exp = EXPERIMENTS[cfg.experiment]
    out_dir = Path(cfg["output.dir"])
    fmt = cfg["output.format"]
    try:
        if cfg["output.emit_plot_script"] and fmt != "csv":
            raise ConfigError("plot scripts read CSV output; use output.format = csv")
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        exp.validate(cfg)
        tasks = exp.tasks(cfg)
        _check_writable(out_dir)
    except ConfigError as exc:
        print(f"ptqed: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        results = _map_tasks(tasks, jobs)
        outputs = exp.build(cfg, results)
    except NUMERICAL_ERRORS as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        err = out_dir / f"{cfg.experiment}.err"
        err.write_text(f"{type(exc).__name__}: {exc}\n", encoding="utf-8")
        print(f"ptqed: numerical failure: {type(exc).__name__}: {exc} (see {err})", file=stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - start

    out_dir.mkdir(parents=True, exist_ok=True)
    for out in outputs:
        meta = {"tool": f"ptqed {__version__}", "experiment": cfg.experiment,
                "config_hash": cfg.config_hash()}
        if not deterministic:
            meta["wall_clock_s"] = round(elapsed, 3)
        meta.update(out.table.metadata)
        out.table.metadata = meta
        data_name = f"{out.stem}.{fmt}"
        emit(out.table, fmt, out_dir / data_name)
        if cfg["output.emit_plot_script"] and out.plot is not None:
            script = plot_script(out.table, data_name, **out.plot)
            (out_dir / f"{out.stem}_plot.py").write_text(script, encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, experiment=args.experiment)
    except ConfigError as exc:
        print(f"ptqed: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is not None:
        cfg.values["output.dir"] = args.out
    if args.format is not None:
        cfg.values["output.format"] = args.format
    if args.emit_plot_script:
        cfg.values["output.emit_plot_script"] = True
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    try:
        return run(cfg, jobs=jobs, deterministic=args.deterministic)
    except Exception:  # unexpected: still report as a numerical failure with traceback
        traceback.print_exc()
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
