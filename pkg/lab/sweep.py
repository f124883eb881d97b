"""One-axis parameter sweeps over a scenario config."""

import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from lab.config import ConfigError, Settings
from lab.results import CSV_OPTIONS, output_directory
from lab.scenarios import run_outcome
from lab.schema import parse_scenario

logger = logging.getLogger(__name__)


def parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values: expected a comma-separated list of numbers, got {text!r}") from None


def with_value(config, path, value):
    """Copy of `config` with the scalar at dotted `path` replaced."""
    data = config.model_dump()
    parts = path.split(".")
    node = data
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"--axis {path}: {part!r} does not resolve to a config block")
        node = node[part]
    leaf = parts[-1]
    if leaf not in node:
        raise ConfigError(f"--axis {path}: no field {leaf!r}")
    if isinstance(node[leaf], (dict, list)):
        raise ConfigError(f"--axis {path}: not a scalar field")
    integral = isinstance(node[leaf], int) and not isinstance(node[leaf], bool)
    node[leaf] = int(value) if integral and float(value).is_integer() else value
    return parse_scenario(data, f"--axis {path}={value:g}")


def _run_point(config):
    return run_outcome(config).summary


def sweep(config, path, values, workers=None, settings=None):
    """One run per value; rows in axis order, axis value first."""
    if not values:
        raise ConfigError("--values: at least one value is required")
    configs = [with_value(config, path, v) for v in values]
    workers = min(workers or (settings or Settings()).workers, len(configs))
    logger.info("sweeping %s over %d values with %d workers", path, len(values), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_point, configs))
    else:
        summaries = [_run_point(c) for c in configs]

    table = pd.DataFrame(summaries)
    table.insert(0, path, values)
    for column in list(table.columns[1:]):
        series = table[column].to_numpy(dtype=float)
        if len(series) > 1 and np.all(series != 0):
            table[f"{column}_ratio"] = np.concatenate([[np.nan], series[1:] / series[:-1]])
    return table


def write_sweep(table, config, out=None, settings=None):
    directory = output_directory(config, out, settings)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "sweep.csv"
    table.to_csv(path, **CSV_OPTIONS)
    return path
