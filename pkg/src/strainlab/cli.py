"""Command-line surface.

Subcommands: simulate (run a config, write CSV + manifest + optional
snapshot and figures), verify (identity suite), diagnose (one-shot record
for a snapshot), scan-mu (shared initial state across model weights),
constants (reference table), report (figures from an existing CSV).

Exit codes: 0 success, 1 failed checks or a failed run, 2 usage and
configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config, render_config
from .diagnostics import DEFAULT_ALPHAS, DEFAULT_QS, compute_record, reference_constants
from .persistence import (
    SnapshotError,
    _record_row,
    csv_columns,
    read_field_snapshot,
    read_manifest,
    write_diagnostics_csv,
    write_manifest,
    write_state_snapshot,
)
from .report import render_report
from .solver import NumericalFailure, RunResult, blowup_monitor, build_initial, run
from .spectral import band_limit
from . import operators as ops
from . import verify as verify_mod


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _json_safe(value):
    """Replace non-finite floats, which JSON cannot carry, with None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _write_outputs(
    rc: RunConfig, result: RunResult, out_dir: Path, started: str, plots: bool
) -> dict:
    sim = rc.sim
    verdict = blowup_monitor(result, sim)
    csv_path = out_dir / "diagnostics.csv"
    write_diagnostics_csv(csv_path, result.records, sim.alphas, sim.qs)
    snapshot_name = None
    if rc.final_snapshot:
        snapshot_name = "final_state.mnss"
        write_state_snapshot(out_dir / snapshot_name, result.final_state)
    manifest = {
        "config_echo": render_config(rc),
        "code_version": __version__,
        "seed": sim.initial.seed,
        "started": started,
        "finished": _now(),
        "stop_reason": result.stop_reason,
        "final_t": result.final_state.t,
        "steps": result.final_state.step_count,
        "records": len(result.records),
        "diagnostics_csv": csv_path.name,
        "final_snapshot": snapshot_name,
        "verdict": _json_safe(dataclasses.asdict(verdict.report) | {"claim": verdict.claim}),
    }
    write_manifest(out_dir / "manifest.json", manifest)
    if plots:
        for path in render_report(csv_path, out_dir, manifest):
            print(f"wrote {path}")
    return manifest


def _cmd_simulate(args) -> int:
    rc = load_config(args.config)
    out_dir = Path(rc.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    try:
        result = run(rc.sim)
    except NumericalFailure as exc:
        write_state_snapshot(out_dir / "failed_state.mnss", exc.state)
        if exc.records:
            write_diagnostics_csv(
                out_dir / "diagnostics.csv", exc.records, rc.sim.alphas, rc.sim.qs
            )
        print(f"run failed: {exc}", file=sys.stderr)
        print(f"last good state in {out_dir / 'failed_state.mnss'}", file=sys.stderr)
        return 1
    manifest = _write_outputs(rc, result, out_dir, started, rc.plots or args.plots)
    print(f"stop reason: {result.stop_reason}")
    print(f"final t = {result.final_state.t:.6g} after {result.final_state.step_count} steps")
    growth = result.records[-1].enstrophy / result.initial_enstrophy
    print(f"enstrophy growth factor {growth:.6g}")
    print(manifest["verdict"]["claim"])
    print(f"outputs in {out_dir}")
    return 0


def _cmd_verify(args) -> int:
    results = verify_mod.run_all(seed=args.seed, n=args.n)
    print(verify_mod.format_results(results))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)} of {len(results)} checks passed")
    return 1 if failed else 0


def _cmd_diagnose(args) -> int:
    fld, time = read_field_snapshot(args.snapshot)
    if fld.ncomp == 3:
        s = ops.sym_grad(ops.leray_project(fld))
    else:
        s = ops.strain_project(band_limit(fld))
    alphas = tuple(args.alpha) if args.alpha else DEFAULT_ALPHAS
    qs = tuple(args.q) if args.q else DEFAULT_QS
    rec = compute_record(
        s, time, args.mu, args.advection, level="full", alphas=alphas, qs=qs
    )
    print(",".join(csv_columns(alphas, qs)))
    print(_record_row(rec, alphas, qs))
    return 0


def _cmd_scan_mu(args) -> int:
    rc = load_config(args.config)
    try:
        mus = [float(part) for part in args.mu_list.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"bad --mu-list {args.mu_list!r}") from None
    if len(mus) < 2:
        raise ConfigError("--mu-list needs at least two values")
    out_dir = Path(rc.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    level = rc.sim.diagnostics_level
    if level == "light":
        level = "standard"  # the comparison needs rates
    s0 = build_initial(rc.sim)
    rates = []
    for mu in mus:
        sim = dataclasses.replace(rc.sim, mu=mu, diagnostics_level=level)
        result = run(sim, initial=s0)
        write_diagnostics_csv(
            out_dir / f"diagnostics_mu_{mu:g}.csv", result.records, sim.alphas, sim.qs
        )
        rates.append(result.records[0].rate_measured)
        print(f"mu = {mu:<8g} rate(0) = {rates[-1]:+.12e}")
    scale = max(abs(r) for r in rates)
    spread = (max(rates) - min(rates)) / scale if scale > 0 else 0.0
    print(f"relative rate spread {spread:.3e}")
    if not spread <= 1e-9:
        print("initial enstrophy rates disagree across the family", file=sys.stderr)
        return 1
    return 0


def _cmd_constants(_args) -> int:
    table = reference_constants()
    width = max(len(name) for name in table)
    for name, value in table.items():
        print(f"{name:<{width}}  {value:.17g}")
    return 0


def _cmd_report(args) -> int:
    manifest = read_manifest(args.manifest) if args.manifest else None
    out_dir = Path(args.out) if args.out else Path(args.csv).parent
    for path in render_report(args.csv, out_dir, manifest):
        print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strainlab",
        description="Pseudo-spectral laboratory for strain-formulated incompressible flow models.",
    )
    parser.add_argument("--version", action="version", version=f"strainlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configuration and write its outputs")
    p.add_argument("config", help="path to a run configuration")
    p.add_argument("--plots", action="store_true", help="render figures as well")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run the identity and property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=32, help="grid size (power of two)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("diagnose", help="print one full diagnostics row for a snapshot")
    p.add_argument("snapshot", help="field snapshot path")
    p.add_argument("--alpha", type=float, action="append", help="Sobolev order (repeatable)")
    p.add_argument("--q", type=float, action="append", help="Lebesgue exponent (repeatable)")
    p.add_argument("--mu", type=float, default=1.0, help="model weight for the rate columns")
    p.add_argument(
        "--advection",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="include the advection term in the rate columns",
    )
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("scan-mu", help="one initial state, several model weights")
    p.add_argument("config", help="path to a run configuration")
    p.add_argument("--mu-list", required=True, help="comma-separated model weights")
    p.set_defaults(func=_cmd_scan_mu)

    p = sub.add_parser("constants", help="print the reference constants table")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("report", help="render figures for an existing diagnostics CSV")
    p.add_argument("csv", help="diagnostics CSV path")
    p.add_argument("--out", help="figure directory (default: next to the CSV)")
    p.add_argument("--manifest", help="manifest to annotate the figures with")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
