"""Spectral bases of the subsystem Hamiltonian and grid <-> mode transforms."""

import logging
from dataclasses import dataclass

import numpy as np

from numerics.errors import ValidationError
from numerics.grid import Grid, integrate
from numerics.linalg import HermitianMatrix, eigh
from quantum.system import SystemSpec, apply_hamiltonian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise ValidationError(f"wave function has shape {v.shape}, grid has {self.grid.n} nodes")
        if not np.all(np.isfinite(v)):
            raise ValidationError("wave function has non-finite amplitudes")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def norm(self):
        return float(np.sqrt(integrate(np.abs(self.values) ** 2, grid=self.grid).real))

    def normalized(self):
        norm = self.norm()
        if norm == 0:
            raise ValidationError("cannot normalize the zero wave function")
        return WaveFunction(self.grid, self.values / norm)

    def overlap(self, other):
        """<other|self> = integral of self * conj(other)."""
        return complex(integrate(self.values, other.values, grid=self.grid))

    def __add__(self, other):
        _same_grid(self.grid, other.grid)
        return WaveFunction(self.grid, self.values + other.values)

    def __mul__(self, scalar):
        return WaveFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ModeAmplitudes:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return len(self.coefficients)

    @property
    def weight(self):
        """Sum of |c_n|^2."""
        return float(np.sum(np.abs(self.coefficients) ** 2))

    @classmethod
    def unit(cls, index, count):
        c = np.zeros(count, dtype=complex)
        c[index] = 1.0
        return cls(c)


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    spec: SystemSpec
    energies: np.ndarray
    states: np.ndarray  # (grid.n, count), columns are psi_n

    @property
    def grid(self):
        return self.spec.grid

    @property
    def count(self):
        return len(self.energies)

    def state(self, index):
        return WaveFunction(self.grid, self.states[:, index])

    def truncated(self, count):
        if not 0 < count <= self.count:
            raise ValidationError(f"cannot keep {count} of {self.count} modes")
        return SpectralBasis(self.spec, self.energies[:count], self.states[:, :count])

    def overlap_matrix(self):
        s = self.states
        return integrate(s[:, :, None] * np.conj(s[:, None, :]), grid=self.grid, axis=0)

    def residuals(self):
        """Grid norms of H psi_n - E_n psi_n."""
        r = apply_hamiltonian(self.spec, self.states) - self.states * self.energies
        return np.sqrt(integrate(np.abs(r) ** 2, grid=self.grid, axis=0).real)


def _same_grid(a, b):
    if a != b:
        raise ValidationError(f"grid mismatch: {a.describe()} vs {b.describe()}")


def spectral_basis(spec, count):
    """Lowest `count` Dirichlet eigenpairs of the discretized H, trapezoid-normalized."""
    interior = spec.grid.n - 2
    if not 0 < count <= interior:
        raise ValidationError(f"count must be in [1, {interior}] for a {spec.grid.n}-point grid, got {count}")

    decomposition = eigh(HermitianMatrix(spec.interior_matrix), count=count)
    states = np.zeros((spec.grid.n, count))
    # interior samples carry full trapezoid weight h, ends are pinned to 0
    states[1:-1] = decomposition.vectors / np.sqrt(spec.grid.h)
    states.flags.writeable = False
    logger.debug("spectral basis: %d modes on %s, E in [%.6g, %.6g]",
                 count, spec.grid.describe(), decomposition.values[0], decomposition.values[-1])
    return SpectralBasis(spec=spec, energies=decomposition.values, states=states)


def project(state, basis):
    """c_n = integral of state * conj(psi_n) dq."""
    _same_grid(state.grid, basis.grid)
    c = integrate(state.values[:, None], basis.states, grid=basis.grid, axis=0)
    return ModeAmplitudes(c)


def reconstruct(amps, basis):
    """Sum_n c_n psi_n on the grid."""
    if len(amps) != basis.count:
        raise ValidationError(f"{len(amps)} amplitudes for a {basis.count}-mode basis")
    return WaveFunction(basis.grid, basis.states @ amps.coefficients)


def out_of_span_tail(state, basis):
    """Norm of the part of `state` the basis cannot represent."""
    residual = state.values - reconstruct(project(state, basis), basis).values
    return WaveFunction(state.grid, residual).norm()


def gaussian_packet(grid, center=0.0, width=1.0, momentum=0.0, hbar=1.0):
    """Normalized exp(-(q-center)^2/(4 width^2) + i momentum q / hbar); |psi|^2 has std `width`."""
    q = grid.points
    values = np.exp(-((q - center) ** 2) / (4.0 * width**2) + 1j * momentum * q / hbar)
    return WaveFunction(grid, values).normalized()
