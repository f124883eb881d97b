"""Conditional density matrices rho(q, q'; q_c), clock-reading collapse and the
von Neumann residual of the reduced dynamics."""

import logging
from dataclasses import dataclass

import numpy as np

from clocks.free import clock_speed
from extended.diagnostics import envelope_and_residuals
from mixed.density import HERMITIAN_TOL, RESIDUAL_FLOOR, ExtendedDensityMatrix
from numerics.errors import ValidationError
from numerics.grid import RESIDUAL_MARGIN, Grid, derivative_field, interior_slice, trapezoid_weights
from quantum.system import hamiltonian_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConditionalDensityMatrix:
    grid: Grid
    values: np.ndarray
    clock_reading: float
    clock_index: int

    def __post_init__(self):
        rho = np.array(self.values, dtype=complex)
        if rho.shape != (self.grid.n, self.grid.n):
            raise ValidationError(f"conditional density has shape {rho.shape}, grid has {self.grid.n} nodes")
        scale = max(1.0, float(np.max(np.abs(rho))))
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL * scale:
            raise ValidationError("conditional density is not Hermitian")
        rho.flags.writeable = False
        object.__setattr__(self, "values", rho)

    def trace(self):
        return float(np.real(np.sum(np.diag(self.values) * trapezoid_weights(self.grid))))

    def normalized(self):
        tr = self.trace()
        if tr <= 0:
            raise ValidationError(f"conditional density at q_c={self.clock_reading:.6g} has trace {tr:.3e}")
        return ConditionalDensityMatrix(self.grid, self.values / tr, self.clock_reading, self.clock_index)


def conditional_density(density, q_c):
    """rho(q, q') = R(q, q_c, q', q_c) at a clock node (no interpolation)."""
    j = density.clock_grid.locate(q_c)
    rho = density.as_tensor()[:, j, :, j]
    return ConditionalDensityMatrix(density.system_grid, rho, float(density.clock_grid.points[j]), j)


@dataclass(frozen=True, eq=False)
class ConditionalFamily:
    clock_grid: Grid
    members: tuple

    def stack(self):
        return np.stack([m.values for m in self.members])

    def traces(self):
        return np.array([m.trace() for m in self.members])


def conditional_family(density):
    return ConditionalFamily(
        density.clock_grid,
        tuple(conditional_density(density, q) for q in density.clock_grid.points),
    )


@dataclass(frozen=True, eq=False)
class CollapsedDensity:
    """R_m after reading q_c = q_c0: delta(q_c - q_c0) delta(q_c' - q_c0) rho(q, q').

    rho is normalized to unit trace; `probability` keeps the pre-collapse
    trace. Grid deltas are the node indicator divided by the clock spacing.
    """

    source: ExtendedDensityMatrix
    clock_index: int
    clock_reading: float
    rho: ConditionalDensityMatrix
    probability: float

    def as_density(self):
        n, m = self.source.system_grid.n, self.source.clock_grid.n
        h = self.source.clock_grid.h
        tensor = np.zeros((n, m, n, m), dtype=complex)
        tensor[:, self.clock_index, :, self.clock_index] = self.rho.values / h**2
        return ExtendedDensityMatrix(
            self.source.spec, self.source.clock_grid, tensor.reshape(n * m, n * m), self.source.weights, self.source.clock
        )


def measurement_collapse(density, q_c):
    rho = conditional_density(density, q_c)
    return CollapsedDensity(
        source=density,
        clock_index=rho.clock_index,
        clock_reading=rho.clock_reading,
        rho=rho.normalized(),
        probability=rho.trace(),
    )


@dataclass(frozen=True)
class VonNeumannResidual:
    clock_indices: np.ndarray
    absolute: np.ndarray
    reference: np.ndarray
    matrices: np.ndarray = None  # residual at each interior node

    @property
    def relative(self):
        return self.absolute / (self.reference + RESIDUAL_FLOOR)

    @property
    def norm(self):
        """Aggregate relative residual over all interior nodes."""
        return float(np.sqrt(np.sum(self.absolute**2)) / (np.sqrt(np.sum(self.reference**2)) + RESIDUAL_FLOOR))


def von_neumann_residual(family, h_matrix, clock):
    """|i hbar v d rho/dq_c - [H, rho]|_F per interior clock node."""
    if family.clock_grid.n < 5:
        raise ValidationError("the von Neumann residual needs at least 5 clock nodes")
    rho = family.stack()
    h = np.asarray(h_matrix)
    slope = derivative_field(rho, family.clock_grid, order=1, axis=0)
    commutator = np.einsum("ab,kbc->kac", h, rho) - np.einsum("kab,bc->kac", rho, h)
    residual = 1j * clock.hbar * clock_speed(clock) * slope - commutator
    inner = interior_slice(family.clock_grid, RESIDUAL_MARGIN)
    return VonNeumannResidual(
        clock_indices=np.arange(family.clock_grid.n)[inner],
        absolute=np.linalg.norm(residual[inner], axis=(1, 2)),
        reference=np.linalg.norm(commutator[inner], axis=(1, 2)),
        matrices=residual[inner],
    )


def implied_density_residual(state, clock):
    """Von Neumann residual of the pure family psi psi^H built from the envelope of Psi.

    psi psi^H equals Psi Psi^H node by node, so for a single-state ensemble this
    matches the mixed track to rounding; it checks the R -> rho extraction, not
    the reduced equation. See `reduced_density_residual` for that.
    """
    envelope = envelope_and_residuals(state, clock).envelope
    members = tuple(
        ConditionalDensityMatrix(
            state.system_grid, np.outer(envelope[:, j], envelope[:, j].conj()), float(q), j
        )
        for j, q in enumerate(state.clock_grid.points)
    )
    return von_neumann_residual(ConditionalFamily(state.clock_grid, members), hamiltonian_matrix(state.spec), clock)


def reduced_density_residual(state, clock):
    """Pure track built from the reduced residual r of the envelope: r psi^H - psi r^H.

    In the continuum this is exactly the von Neumann residual of psi psi^H. On
    the clock grid the two differ by the product-rule defect of the central
    difference, (h^2/2) i hbar v (psi'' psi'^H + psi' psi''^H) at leading order.
    """
    diagnostics = envelope_and_residuals(state, clock)
    psi, r = diagnostics.envelope, diagnostics.reduced_residual
    inner = interior_slice(state.clock_grid, RESIDUAL_MARGIN)
    residual = np.einsum("ak,bk->kab", r, psi.conj()) - np.einsum("ak,bk->kab", psi, r.conj())
    h = hamiltonian_matrix(state.spec)
    rho = np.einsum("ak,bk->kab", psi, psi.conj())
    commutator = np.einsum("ab,kbc->kac", h, rho) - np.einsum("kab,bc->kac", rho, h)
    return VonNeumannResidual(
        clock_indices=np.arange(state.clock_grid.n)[inner],
        absolute=np.linalg.norm(residual[inner], axis=(1, 2)),
        reference=np.linalg.norm(commutator[inner], axis=(1, 2)),
        matrices=residual[inner],
    )
