"""Running a scenario end to end and persisting result.json, metrics.csv and plotdata.csv."""

import logging
import time
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from lab.config import VERSION, ConfigError, NumericalFailure, Settings, numeric_default
from lab.scenarios import run_outcome
from lab.schema import ResultRecord

logger = logging.getLogger(__name__)

CSV_OPTIONS = {"index": False, "float_format": "%.17g", "lineterminator": "\n"}


def environment_stamp(config):
    seed = config.run.seed if config.run.seed is not None else numeric_default("seed")
    return {"clocklab": VERSION, "numpy": np.__version__, "scipy": scipy.__version__, "seed": int(seed)}


def plot_table(curves):
    """Long-format curve table: one (curve, x, y) row per point."""
    frames = [
        pd.DataFrame({"curve": name, "x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float)})
        for name, (x, y) in curves.items()
    ]
    if not frames:
        return pd.DataFrame(columns=["curve", "x", "y"])
    return pd.concat(frames, ignore_index=True)


def output_directory(config, out=None, settings=None):
    if out is not None:
        return Path(out)
    if config.output.directory:
        return Path(config.output.directory)
    return (settings or Settings()).output_dir / config.scenario


def build_record(config, outcome, wall_clock):
    try:
        return ResultRecord(
            scenario=config.scenario,
            config=config.model_dump(mode="json"),
            summary={k: float(v) for k, v in outcome.summary.items()},
            metrics=[{k: float(v) for k, v in row.items()} for row in outcome.metrics.to_dict("records")],
            checks=[c.as_dict() for c in outcome.checks],
            warnings=outcome.warnings,
            environment=environment_stamp(config),
            wall_clock=wall_clock,
        )
    except ValueError as exc:
        raise NumericalFailure("result", str(exc)) from None


def write_results(record, outcome, directory, formats=("json", "csv")):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = directory / "result.json"
        path.write_text(record.model_dump_json(indent=2) + "\n")
        written.append(path)
    if "csv" in formats:
        metrics_path = directory / "metrics.csv"
        outcome.metrics.to_csv(metrics_path, **CSV_OPTIONS)
        plot_path = directory / "plotdata.csv"
        plot_table(outcome.curves).to_csv(plot_path, **CSV_OPTIONS)
        written.extend([metrics_path, plot_path])
    logger.info("wrote %s", ", ".join(p.name for p in written))
    return written


def run_scenario(config, out=None, settings=None, write=True):
    """Run, persist, then raise NumericalFailure if any check failed."""
    if config.scenario is None:
        raise ConfigError("scenario: missing")
    start = time.perf_counter()
    outcome = run_outcome(config)
    record = build_record(config, outcome, time.perf_counter() - start)
    if write:
        write_results(record, outcome, output_directory(config, out, settings), config.output.formats)
    failures = outcome.failures
    if failures:
        first = failures[0]
        raise NumericalFailure(first.name, f"{first.value:.6g} not {first.limit}")
    return record, outcome
