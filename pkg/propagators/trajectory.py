"""Sampled state families and their comparison."""

from dataclasses import dataclass, field

import numpy as np

from numerics.errors import ValidationError
from numerics.grid import Grid, integrate
from quantum.basis import WaveFunction

PARAMETER_KINDS = ("t", "tau", "z", "q_c")
PHASE_MODES = ("raw", "global_phase_removed")


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: Grid
    parameters: np.ndarray
    states: np.ndarray  # (len(parameters), grid.n)
    kind: str = "t"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PARAMETER_KINDS:
            raise ValidationError(f"unknown trajectory parameter {self.kind!r}")
        params = np.array(self.parameters, dtype=float).reshape(-1)
        states = np.array(self.states, dtype=complex)
        if states.shape != (len(params), self.grid.n):
            raise ValidationError(
                f"trajectory states have shape {states.shape}, expected {(len(params), self.grid.n)}"
            )
        if np.any(np.diff(params) <= 0):
            raise ValidationError("trajectory parameters must be strictly increasing")
        params.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "parameters", params)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return len(self.parameters)

    def sample(self, index):
        return WaveFunction(self.grid, self.states[index])

    def norms(self):
        return np.sqrt(integrate(np.abs(self.states) ** 2, grid=self.grid).real)

    def relabeled(self, kind, parameters=None, **metadata):
        params = self.parameters if parameters is None else parameters
        return Trajectory(self.grid, params, self.states, kind, {**self.metadata, **metadata})


@dataclass(frozen=True)
class TrajectoryComparison:
    parameters: np.ndarray
    l2_error: np.ndarray
    fidelity: np.ndarray
    phase_mode: str

    @property
    def terminal_error(self):
        return float(self.l2_error[-1])

    @property
    def worst_fidelity(self):
        return float(np.max(self.fidelity))


def compare_trajectories(a, b, phase_mode="global_phase_removed"):
    """Per-sample L2 distance and fidelity 1 - |<a|b>|/(|a||b|)."""
    if phase_mode not in PHASE_MODES:
        raise ValidationError(f"phase_mode must be one of {PHASE_MODES}, got {phase_mode!r}")
    if a.grid != b.grid:
        raise ValidationError(f"trajectories live on different grids: {a.grid.describe()} vs {b.grid.describe()}")
    if a.parameters.shape != b.parameters.shape or not np.array_equal(a.parameters, b.parameters):
        raise ValidationError("trajectory samples do not match")

    overlaps = integrate(b.states, a.states, grid=a.grid)
    norm_a, norm_b = a.norms(), b.norms()
    aligned = b.states
    if phase_mode == "global_phase_removed":
        phases = np.ones_like(overlaps)
        nonzero = np.abs(overlaps) > 0
        phases[nonzero] = overlaps[nonzero] / np.abs(overlaps[nonzero])
        aligned = b.states * np.conj(phases)[:, None]

    diff = a.states - aligned
    l2 = np.sqrt(integrate(np.abs(diff) ** 2, grid=a.grid).real)

    denom = norm_a * norm_b
    fidelity = np.where(denom > 0, 1.0 - np.abs(overlaps) / np.where(denom > 0, denom, 1.0), 0.0)
    both_zero = (norm_a == 0) & (norm_b == 0)
    fidelity = np.where((denom == 0) & ~both_zero, 1.0, fidelity)
    return TrajectoryComparison(a.parameters, l2, fidelity, phase_mode)
