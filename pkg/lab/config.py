"""
Configuration for the clocklab front end
"""

import os
from functools import lru_cache
from pathlib import Path

import yaml
from dotenv import load_dotenv

from numerics.errors import ClockLabError

ROOT = Path(__file__).resolve().parent.parent
VERSION = "0.1.0"

# Load .env file if present
load_dotenv(ROOT / ".env")


class ConfigError(ClockLabError):
    """Scenario or lab configuration is invalid (exit code 2)."""


class NumericalFailure(ClockLabError):
    """A tolerance or acceptance check failed (exit code 1)."""

    def __init__(self, metric, message):
        self.metric = metric
        self.message = message
        super().__init__(f"{metric}: {message}")

    # rebuilt from its fields when sent back from a sweep worker
    def __reduce__(self):
        return type(self), (self.metric, self.message)


class Settings:
    def __init__(self, environ=None):
        env = os.environ if environ is None else environ
        # Parallel width for sweeps
        try:
            self.workers = int(env.get("CLOCKLAB_WORKERS", os.cpu_count() or 1))
        except ValueError:
            raise ConfigError(f"CLOCKLAB_WORKERS must be an integer, got {env['CLOCKLAB_WORKERS']!r}") from None
        if self.workers < 1:
            raise ConfigError("CLOCKLAB_WORKERS must be at least 1")

        # Output and defaults
        self.output_dir = Path(env.get("CLOCKLAB_OUTPUT", ROOT / "results"))
        self.defaults_path = Path(env.get("CLOCKLAB_DEFAULTS", ROOT / "config" / "lab.yaml"))
        self.scenarios_dir = ROOT / "config" / "scenarios"


@lru_cache(maxsize=None)
def load_defaults(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"lab defaults file not found: {path}")
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return data


def defaults(settings=None):
    return load_defaults(str((settings or Settings()).defaults_path))


def numeric_default(key, settings=None):
    value = defaults(settings).get("numerics", {}).get(key)
    if value is None:
        raise ConfigError(f"numerics.{key} missing from the lab defaults")
    return value
