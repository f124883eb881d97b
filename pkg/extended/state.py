"""Fields on the extended (system x clock) configuration space."""

from dataclasses import dataclass, field

import numpy as np

from numerics.errors import ValidationError
from numerics.grid import Grid, integrate
from quantum.basis import WaveFunction
from quantum.system import SystemSpec


@dataclass(frozen=True, eq=False)
class ExtendedState:
    """Psi(q, q_c) sampled as values[i, j] = Psi(q_i, q_c_j)."""

    spec: SystemSpec
    clock_grid: Grid
    values: np.ndarray
    clock: object = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        expected = (self.spec.grid.n, self.clock_grid.n)
        if v.shape != expected:
            raise ValidationError(f"extended state has shape {v.shape}, expected {expected}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("extended state has non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def system_grid(self):
        return self.spec.grid

    @property
    def shape(self):
        return self.values.shape

    def slice(self, index):
        return WaveFunction(self.system_grid, self.values[:, index])

    def slice_at(self, q_c):
        return self.slice(self.clock_grid.locate(q_c))

    def slice_norms(self):
        """n(q_c) = integral of |Psi(q, q_c)|^2 dq at every clock node."""
        return integrate(np.abs(self.values) ** 2, grid=self.system_grid, axis=0).real

    def flat(self):
        """Composite vector, index i * n_clock + j."""
        return self.values.reshape(-1)
