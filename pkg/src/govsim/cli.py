"""Command-line interface: ``govsim run | analyze | report``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .experiments import GridResult, aggregate_levels, run_grid, scenario_matrix
from .governance import ParameterError, load_parameters
from .report import build_report, manifest, parse_runs_csv, runs_csv, write_text


class CliError(Exception):
    pass


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    if not out.is_dir():
        raise CliError(f"output path {out} is not a directory")
    return out


def _write_bundle(grid: GridResult, out: Path) -> list[Path]:
    written = []
    for name, text in build_report(grid).files().items():
        write_text(out / name, text)
        written.append(out / name)
    return written


def _read_runs(path: str) -> GridResult:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_runs_csv(text, source=path)


def cmd_run(args: argparse.Namespace) -> int:
    if args.replicates < 1:
        raise CliError("--replicates must be >= 1")
    if args.parallel < 1:
        raise CliError("--parallel must be >= 1")
    params = load_parameters(args.config)
    out = _out_dir(args.out)
    grid = run_grid(args.seed, args.replicates, params, parallel=args.parallel)
    text = runs_csv(grid)
    write_text(out / "runs.csv", text)
    # aggregate from the persisted rendering so `analyze` reproduces it exactly
    _write_bundle(parse_runs_csv(text), out)
    write_text(out / "manifest.json", manifest(args.seed, args.replicates, params.digest, params.source, len(grid)))
    print(f"wrote {len(grid)} runs and reports to {out}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    grid = _read_runs(args.runs)
    out = _out_dir(args.out)
    _write_bundle(grid, out)
    print(f"analyzed {len(grid)} runs into {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .figures import render_figures

    grid = _read_runs(args.runs)
    out = _out_dir(args.out)
    _write_bundle(grid, out)
    figs = render_figures(aggregate_levels(grid), scenario_matrix(grid, grid.scenarios, grid.levels), out)
    print(f"rendered tables and {len(figs)} figures into {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="govsim", description="Agent governance maturity simulation laboratory.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the scenario x level x replicate grid")
    run.add_argument("--config", help="parameter file (YAML); defaults to the shipped calibration")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--seed", type=int, default=42, help="base seed (default: 42)")
    run.add_argument("--replicates", type=int, default=30, help="replicates per cell (default: 30)")
    run.add_argument("--parallel", type=int, default=1, help="worker processes (default: 1)")
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze", help="recompute tables from an existing runs.csv")
    an.add_argument("--runs", required=True, help="path to runs.csv")
    an.add_argument("--out", default="out", help="output directory (default: out)")
    an.set_defaults(func=cmd_analyze)

    rp = sub.add_parser("report", help="tables plus PNG figures from an existing runs.csv")
    rp.add_argument("--runs", required=True, help="path to runs.csv")
    rp.add_argument("--out", default="out", help="output directory (default: out)")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ParameterError, ValueError, OSError) as exc:
        print(f"govsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
