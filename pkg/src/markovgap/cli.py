"""Command-line interface.

Subcommands: run, sweep, validate, oracle-check, bands.  Exit codes:
0 success, 2 config error, 3 geometry error, 4 numeric failure,
5 optimization did not converge (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .dense import oracle_check
from .driver import band_table, execute_run, execute_sweep, validate_config
from .errors import (
    ConfigError,
    ConvergenceError,
    GeometryError,
    MarkovGapError,
    NumericError,
)

EXIT_CODES = {
    ConfigError: 2,
    GeometryError: 3,
    NumericError: 4,
    ConvergenceError: 5,
}


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        config = replace(config, seed=args.seed,
                         optimizer=replace(config.optimizer, seed=args.seed))
    if args.out is not None:
        config = replace(config, output=replace(config.output, dir=args.out))
    return config


def _out_dir(config: RunConfig) -> Path:
    path = Path(config.output.dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_trace(path: Path, report):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "h", "grad_norm", "step", "noise"])
        for row in report.h_trace:
            writer.writerow([row.iteration, repr(float(row.h)), repr(float(row.grad_norm)),
                             repr(float(row.step)), int(row.noise)])


def _write_generators(path: Path, result):
    arrays = {}
    for i, rel in enumerate(result.setup.support_rels):
        arrays[f"mask{i}"] = result.setup.universe[rel]
        arrays[f"generator{i}"] = result.report.generators[i]
    np.savez(path, **arrays)


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = _out_dir(config)
    print(f"model {config.model.kind} (p={config.model.p}, q={config.model.q}), "
          f"regions {config.geometry.l_a}/{config.geometry.l_b}, "
          f"shape {config.geometry.shape}, R={config.geometry.radius}")
    result = execute_run(config, force=args.force)
    body = result.report_dict()
    (out / "report.json").write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    if result.report is not None:
        _write_trace(out / "h_trace.csv", result.report)
        if config.output.write_generators:
            _write_generators(out / "generators.npz", result)
    print(f"universe: {result.setup.universe.size} modes")
    print(f"bare_h   = {result.bare_h:.6f} nats ({result.bare_h / np.log(2):.6f} log2)")
    print(f"final_h  = {result.final_h:.6f} nats ({result.final_h / np.log(2):.6f} log2)")
    print(f"c_plus   = {result.c_plus_estimate:.4f}")
    print(f"report: {out / 'report.json'}")
    if result.report is not None and not result.report.converged:
        print(f"did not converge ({result.report.reason}) "
              f"after {result.report.iterations} iterations", file=sys.stderr)
        return 5
    return 0


def cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = _out_dir(config)
    rows = execute_sweep(config, jobs=args.jobs, force=args.force)
    path = out / "sweep.csv"
    fields = ["value", "bare_h", "final_h", "final_h_log2", "c_plus_estimate",
              "iterations", "converged", "runtime_s", "error"]
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    for row in rows:
        if row["error"]:
            print(f"  {config.sweep.key}={row['value']}: ERROR {row['error']}")
        else:
            print(f"  {config.sweep.key}={row['value']}: bare={row['bare_h']:.4f} "
                  f"final={row['final_h']:.4f}")
    print(f"sweep table: {path}")
    return 0


def cmd_validate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    checks = validate_config(config)
    worst = 0
    for check in checks:
        status = "pass" if check.passed else "FAIL"
        print(f"{check.name:>18}: {status}  {check.detail}")
        if not check.passed and worst == 0:
            worst = check.exit_code
    return worst


def cmd_oracle_check(args) -> int:
    result = oracle_check(seed=args.seed if args.seed is not None else 7)
    for key, val in result.items():
        if key == "passed":
            continue
        print(f"{key:>24}: {val:.3e}" if isinstance(val, float) else f"{key:>24}: {val}")
    print("oracle agreement:", "pass" if result["passed"] else "FAIL")
    return 0 if result["passed"] else 4


def cmd_bands(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = _out_dir(config)
    table = band_table(config)
    path = out / "bands.csv"
    n_bands = table.shape[1] - 2
    header = ["kx", "ky"] + [f"E{i}" for i in range(n_bands)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table:
            writer.writerow([repr(float(v)) for v in row])
    print(f"{table.shape[0]} k-points, {n_bands} bands -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markovgap",
        description="Markov gap minimization for free-fermion lattice ground states",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "run": (cmd_run, "bare + optimized Markov gap for one configuration"),
        "sweep": (cmd_sweep, "run the config's sweep section, emit a CSV table"),
        "validate": (cmd_validate, "geometry / purity / Chern / TR diagnostics"),
        "oracle-check": (cmd_oracle_check, "Gaussian formulas vs dense statevectors"),
        "bands": (cmd_bands, "export the Bloch band structure as CSV"),
    }
    for name, (fn, help_text) in specs.items():
        p = sub.add_parser(name, help=help_text)
        if name != "oracle-check":
            p.add_argument("--config", required=True, help="path to a JSON run config")
            p.add_argument("--out", default=None, help="override output.dir")
            p.add_argument("--force", action="store_true",
                           help="ignore the matrix-dimension guardrail")
            p.add_argument("--jobs", type=int, default=1,
                           help="concurrent sweep rows (sweep only)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except MarkovGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for cls, code in EXIT_CODES.items():
            if isinstance(exc, cls):
                return code
        return 1


if __name__ == "__main__":
    sys.exit(main())
