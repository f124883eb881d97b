#!/usr/bin/env python3
"""clocklab: emergent-time Schrödinger lab.

Usage:
    python main.py run <config.json> [--out DIR]          Run one scenario, write results
    python main.py sweep <config.json> --axis PATH --values V1,V2,...  Sweep one config field
    python main.py check [--only N ...] [--tolerance-scale S]          Run the acceptance suite
    python main.py list                                   Show scenarios and example configs
"""

import argparse
import logging
import sys

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from lab.config import VERSION, ConfigError, NumericalFailure, Settings
from lab.schema import SCENARIOS, load_scenario
from numerics.errors import ClockLabError

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger("clocklab")


def setup_logging(verbose=False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
    )
    # numba's compiler chatter is noise at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


def _fmt(value):
    return f"{value:.6g}" if isinstance(value, float) else str(value)


def cmd_run(args):
    """Run one scenario and persist result.json, metrics.csv, plotdata.csv."""
    from lab.results import output_directory, run_scenario

    config = load_scenario(args.config)
    out_dir = output_directory(config, args.out)
    record, outcome = run_scenario(config, out=args.out)

    table = Table(title=f"{config.scenario} ({args.config})")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in record.summary.items():
        table.add_row(key, _fmt(value))
    console.print(table)

    if outcome.checks:
        checks = Table(title="Checks")
        checks.add_column("Check")
        checks.add_column("Value", justify="right")
        checks.add_column("Limit")
        checks.add_column("", justify="center")
        for c in outcome.checks:
            checks.add_row(c.name, _fmt(c.value), c.limit, "[green]ok[/green]" if c.passed else "[red]FAIL[/red]")
        console.print(checks)
    for warning in record.warnings:
        console.print(f"[yellow]warning:[/yellow] {warning}")
    console.print(f"Wrote results to {out_dir} ({record.wall_clock:.1f}s)")


def cmd_sweep(args):
    """One run per axis value, one CSV row per run."""
    from lab.sweep import parse_values, sweep, write_sweep

    config = load_scenario(args.config)
    values = parse_values(args.values)
    table = sweep(config, args.axis, values, workers=args.workers)
    path = write_sweep(table, config, args.out)

    view = Table(title=f"Sweep over {args.axis}")
    for column in table.columns:
        view.add_column(column, justify="right")
    for row in table.itertuples(index=False):
        view.add_row(*(_fmt(float(v)) for v in row))
    console.print(view)
    console.print(f"Saved {len(table)} rows to {path}")


def cmd_check(args):
    """Run the acceptance suite; nonzero exit on any failure."""
    from lab.acceptance import run_acceptance

    results = run_acceptance(only=args.only, scale=args.tolerance_scale)
    table = Table(title="Acceptance")
    table.add_column("#", justify="right")
    table.add_column("Criterion")
    table.add_column("Result", justify="center")
    table.add_column("Time", justify="right")
    table.add_column("Detail")
    for r in results:
        if r.passed:
            status, detail = "[green]PASS[/green]", f"{len(r.checks)} checks"
        else:
            status, detail = "[red]FAIL[/red]", r.error or ", ".join(r.failed_checks)
        table.add_row(str(r.number), r.title, status, f"{r.seconds:.1f}s", detail)
    console.print(table)

    failed = [r for r in results if not r.passed]
    if failed:
        first = failed[0]
        raise NumericalFailure(f"criterion {first.number} ({first.title})", first.error or ", ".join(first.failed_checks))
    console.print(f"[green]All {len(results)} criteria passed[/green]")


def cmd_list(args):
    """Show the scenario names and the example configs shipped in config/scenarios/."""
    settings = Settings()
    table = Table(title=f"clocklab {VERSION}")
    table.add_column("Scenario", style="cyan")
    table.add_column("Example configs")
    examples = sorted(settings.scenarios_dir.glob("*.json"))
    for name in SCENARIOS:
        matching = []
        for path in examples:
            try:
                if load_scenario(path).scenario == name:
                    matching.append(path.name)
            except ConfigError as e:
                logger.warning("skipping %s: %s", path.name, e)
        table.add_row(name, ", ".join(matching) or "-")
    console.print(table)


def main(argv=None):
    parser = argparse.ArgumentParser(description="clocklab: emergent-time Schrödinger lab")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command")

    # run
    p_run = subparsers.add_parser("run", help="Run one scenario config")
    p_run.add_argument("config", help="Scenario JSON document")
    p_run.add_argument("--out", "-o", help="Output directory (overrides the output block)")

    # sweep
    p_sweep = subparsers.add_parser("sweep", help="Sweep one scalar config field")
    p_sweep.add_argument("config", help="Scenario JSON document")
    p_sweep.add_argument("--axis", "-a", required=True, help="Dotted config path, e.g. clock.energy")
    p_sweep.add_argument("--values", required=True, help="Comma-separated values, in order")
    p_sweep.add_argument("--workers", "-w", type=int, help="Parallel runs (default: CLOCKLAB_WORKERS)")
    p_sweep.add_argument("--out", "-o", help="Output directory (overrides the output block)")

    # check
    p_check = subparsers.add_parser("check", help="Run the acceptance suite")
    p_check.add_argument("--only", nargs="+", type=int, help="Criterion numbers to run")
    p_check.add_argument("--tolerance-scale", type=float, default=1.0, help="Scale every tolerance (0 forces failures)")

    # list
    subparsers.add_parser("list", help="Show scenarios and example configs")

    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    commands = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "check": cmd_check,
        "list": cmd_list,
    }

    if args.command not in commands:
        parser.print_help()
        return 0
    try:
        commands[args.command](args)
    except ConfigError as e:
        err_console.print(f"[red]Configuration error:[/red] {e}")
        return 2
    except ClockLabError as e:
        err_console.print(f"[red]Failed:[/red] {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
