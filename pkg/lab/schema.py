"""Pydantic models for scenario documents and result records."""

import json
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from lab.config import ConfigError

SCENARIOS = ("convergence", "wkb-clock", "harmonic-clock", "mixed", "paraxial", "two-time")
SCHEMA_VERSION = 1


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridBlock(StrictModel):
    q_min: float
    q_max: float
    n: int = Field(ge=3)

    @model_validator(mode="after")
    def _ordered(self):
        if self.q_max <= self.q_min:
            raise ValueError("q_max must exceed q_min")
        return self


class PotentialBlock(StrictModel):
    name: str = "box"
    params: Dict[str, float] = Field(default_factory=dict)


class SystemBlock(StrictModel):
    potential: PotentialBlock = Field(default_factory=PotentialBlock)
    mass: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)
    grid: GridBlock


class ClockBlock(StrictModel):
    type: Literal["free", "potential", "harmonic"] = "free"
    mass: float = Field(default=1.0, gt=0)
    energy: Optional[float] = None
    energies: Optional[List[float]] = None
    # "top_mode": energies are multiples of the highest requested mode energy
    energy_unit: Literal["absolute", "top_mode"] = "absolute"
    potential: Optional[PotentialBlock] = None
    quartic: float = 0.0
    omega: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _energy_list(self):
        if self.energy is None and not self.energies:
            raise ValueError("give clock.energy or a non-empty clock.energies")
        if self.energy is not None and self.energies:
            raise ValueError("give clock.energy or clock.energies, not both")
        values = self.ladder()
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("clock.energies must be strictly increasing")
        if any(not math.isfinite(e) or e <= 0 for e in values):
            raise ValueError("clock energies must be positive")
        if self.type == "potential" and self.potential is None:
            raise ValueError("a potential clock needs clock.potential")
        return self

    def ladder(self):
        return [self.energy] if self.energy is not None else list(self.energies)


class InitialState(StrictModel):
    kind: Literal["gaussian", "mode", "random"] = "gaussian"
    center: Optional[float] = None
    width: float = Field(default=0.1, gt=0)
    momentum: float = 0.0
    mode: int = Field(default=0, ge=0)


class ModesBlock(StrictModel):
    count: int = Field(ge=1)
    initial: InitialState = Field(default_factory=InitialState)
    eta: Optional[float] = Field(default=None, gt=0, le=1)


class RunBlock(StrictModel):
    t_max: float = Field(default=1.0, gt=0)
    z_max: float = Field(default=1.0, gt=0)
    clock_points: int = Field(default=201, ge=5)
    samples: int = Field(default=11, ge=2)
    refinements: int = Field(default=0, ge=0)
    ensemble_size: int = Field(default=3, ge=1)
    ladder_dim: int = Field(default=32, ge=2)
    step: float = Field(default=1e-3, gt=0)
    seed: Optional[int] = None
    tolerance_scale: float = Field(default=1.0, ge=0)


class OutputBlock(StrictModel):
    directory: Optional[str] = None
    formats: List[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])


class ScenarioConfig(StrictModel):
    scenario: Literal["convergence", "wkb-clock", "harmonic-clock", "mixed", "paraxial", "two-time"]
    system: SystemBlock
    clock: ClockBlock
    modes: ModesBlock
    run: RunBlock = Field(default_factory=RunBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)


def _format_errors(exc, source):
    lines = []
    for err in exc.errors():
        path = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{source}: {path}: {err['msg']}")
    return "\n".join(lines)


def parse_scenario(data, source="<config>"):
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc, source)) from None


def load_scenario(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_scenario(data, str(path))


class ResultRecord(StrictModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: str
    config: dict
    summary: Dict[str, float]
    metrics: List[Dict[str, float]]
    checks: List[Dict[str, object]] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    environment: Dict[str, object]
    wall_clock: float

    @field_validator("summary")
    @classmethod
    def _finite_summary(cls, value):
        bad = [k for k, v in value.items() if not math.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite summary metrics: {', '.join(bad)}")
        return value

    @field_validator("metrics")
    @classmethod
    def _finite_rows(cls, rows):
        for i, row in enumerate(rows):
            bad = [k for k, v in row.items() if not math.isfinite(v)]
            if bad:
                raise ValueError(f"row {i} has non-finite metrics: {', '.join(bad)}")
        return rows
