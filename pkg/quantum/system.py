"""Subsystem specification and its finite-difference Hamiltonian."""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from numerics.errors import ValidationError
from numerics.grid import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """H = -(hbar^2/2m) d^2/dq^2 + V on `grid`, pinned to zero at both ends."""

    grid: Grid
    potential: np.ndarray
    mass: float = 1.0
    hbar: float = 1.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.array(self.potential, dtype=float)
        if v.ndim == 0:
            v = np.full(self.grid.n, float(v))
        if v.shape != (self.grid.n,):
            raise ValidationError(f"potential has shape {v.shape}, grid has {self.grid.n} nodes")
        if not np.all(np.isfinite(v)):
            raise ValidationError("system potential must be finite at every node")
        if self.mass <= 0 or self.hbar <= 0:
            raise ValidationError("mass and hbar must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "potential", v)

    @classmethod
    def from_potential(cls, grid, potential, mass=1.0, hbar=1.0, label=""):
        """Sample a catalog potential (anything callable on node arrays)."""
        return cls(grid=grid, potential=potential(grid.points), mass=mass, hbar=hbar, label=label)

    def shifted(self, constant):
        return SystemSpec(self.grid, self.potential + constant, self.mass, self.hbar, self.label)

    @cached_property
    def interior_matrix(self):
        """Real symmetric H on the n-2 interior nodes."""
        n = self.grid.n - 2
        t = self.hbar**2 / (2.0 * self.mass * self.grid.h**2)
        mat = np.diag(2.0 * t + self.potential[1:-1])
        off = np.full(n - 1, -t)
        mat += np.diag(off, 1) + np.diag(off, -1)
        mat.flags.writeable = False
        return mat


def hamiltonian_matrix(spec):
    """H on the full grid; boundary rows and columns are zero (Dirichlet)."""
    n = spec.grid.n
    full = np.zeros((n, n))
    full[1:-1, 1:-1] = spec.interior_matrix
    return full


def apply_hamiltonian(spec, field, axis=0):
    """H acting along `axis` of a field sampled on the system grid."""
    psi = np.moveaxis(np.asarray(field), axis, 0)
    if psi.shape[0] != spec.grid.n:
        raise ValidationError(f"field has {psi.shape[0]} samples, system grid has {spec.grid.n}")
    t = spec.hbar**2 / (2.0 * spec.mass * spec.grid.h**2)
    out = np.zeros(psi.shape, dtype=np.result_type(psi, float))
    inner = psi[1:-1]
    v = spec.potential[1:-1].reshape((-1,) + (1,) * (psi.ndim - 1))
    out[1:-1] = (2.0 * t + v) * inner
    out[1:-1] -= t * psi[2:]
    out[1:-1] -= t * psi[:-2]
    # Dirichlet: the pinned end values do not feed the interior rows
    out[1] += t * psi[0]
    out[-2] += t * psi[-1]
    return np.moveaxis(out, 0, axis)


def position_operator(grid):
    return np.diag(grid.points)


def momentum_operator(grid, hbar=1.0):
    """-i hbar d/dq as a central-difference matrix with Dirichlet ends."""
    n = grid.n
    d = (np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / (2.0 * grid.h)
    d[0, :] = 0.0
    d[-1, :] = 0.0
    return -1j * hbar * d