"""Extended density matrices R(q, q_c, q', q_c') and their two-time residuals.

R is stored densely over the composite index a = i * n_clock + j. Traces and
contractions use the trapezoid weight of each composite node.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from clocks.free import carrier_wavenumber, clock_speed
from extended.solutions import forward_solution
from numerics.errors import ResourceError, ValidationError
from numerics.grid import RESIDUAL_MARGIN, Grid, derivative_field, field_norm, trapezoid_weights
from numerics.linalg import eigh
from quantum.basis import ModeAmplitudes, reconstruct
from quantum.system import SystemSpec, apply_hamiltonian

logger = logging.getLogger(__name__)

DENSE_CAP = 4096
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
RESIDUAL_FLOOR = 1e-14


def check_dense_size(dim, cap=DENSE_CAP):
    if dim > cap:
        raise ResourceError(f"composite dimension {dim} exceeds the dense cap {cap}")


def composite_weights(system_grid, clock_grid):
    return np.outer(trapezoid_weights(system_grid), trapezoid_weights(clock_grid)).reshape(-1)


@dataclass(frozen=True, eq=False)
class ExtendedDensityMatrix:
    spec: SystemSpec
    clock_grid: Grid
    values: np.ndarray
    weights: np.ndarray = field(default_factory=lambda: np.ones(1))
    clock: object = None

    def __post_init__(self):
        dim = self.spec.grid.n * self.clock_grid.n
        check_dense_size(dim)
        r = np.array(self.values, dtype=complex)
        if r.shape != (dim, dim):
            raise ValidationError(f"density matrix has shape {r.shape}, composite dimension is {dim}")
        scale = max(1.0, float(np.max(np.abs(r)))) if r.size else 1.0
        asym = float(np.max(np.abs(r - r.conj().T)))
        if asym > HERMITIAN_TOL * scale:
            raise ValidationError(f"density matrix is not Hermitian: max |R - R^H| = {asym:.3e}")
        r.flags.writeable = False
        object.__setattr__(self, "values", r)

    @property
    def dim(self):
        return self.values.shape[0]

    @property
    def system_grid(self):
        return self.spec.grid

    @property
    def quadrature(self):
        return composite_weights(self.system_grid, self.clock_grid)

    def as_tensor(self):
        """R[i, j, k, l] = R(q_i, q_c_j, q_k, q_c_l)."""
        n, m = self.system_grid.n, self.clock_grid.n
        return self.values.reshape(n, m, n, m)

    def trace(self):
        return float(np.real(np.sum(np.diag(self.values) * self.quadrature)))


def ensemble_density(states, weights):
    """R = sum_k w_k Psi_k (x) conj(Psi_k)."""
    weights = np.asarray(weights, dtype=float)
    if len(states) == 0 or len(states) != len(weights):
        raise ValidationError(f"{len(states)} states for {len(weights)} weights")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise ValidationError(f"ensemble weights must be nonnegative and sum to 1, got sum {weights.sum():.12g}")
    first = states[0]
    for k, state in enumerate(states[1:], start=1):
        if state.system_grid != first.system_grid or state.clock_grid != first.clock_grid:
            raise ValidationError(f"state {k} lives on a different product grid")
        if state.clock != first.clock:
            raise ValidationError(f"state {k} was built with a different clock")
    check_dense_size(first.values.size)

    vectors = np.stack([s.flat() for s in states], axis=1)
    r = (vectors * weights) @ vectors.conj().T
    return ExtendedDensityMatrix(first.spec, first.clock_grid, r, weights, first.clock)


def purity(density):
    """Tr(R^2) / Tr(R)^2 with quadrature weights."""
    w = density.quadrature
    r = density.values
    tr2 = float(np.real(np.sum(np.abs(r) ** 2 * np.outer(w, w))))
    return tr2 / density.trace() ** 2


def is_positive_semidefinite(values, weights, tol=PSD_TOL):
    """Smallest eigenvalue of W^1/2 R W^1/2 >= -tol * trace."""
    root = np.sqrt(np.asarray(weights, dtype=float))
    sym = root[:, None] * np.asarray(values) * root[None, :]
    sym = 0.5 * (sym + sym.conj().T)
    lowest = eigh(sym, count=1).values[0]
    trace = float(np.real(np.trace(sym)))
    return bool(lowest >= -tol * max(trace, 0.0))


def random_ensemble(basis, clock, clock_grid, count, rng):
    """Forward solutions from `count` random in-span initial states, with random weights."""
    states = []
    for _ in range(count):
        c = rng.normal(size=basis.count) + 1j * rng.normal(size=basis.count)
        c /= np.linalg.norm(c)
        psi0 = reconstruct(ModeAmplitudes(c), basis)
        states.append(forward_solution(psi0, basis, clock, clock_grid))
    weights = rng.random(count)
    weights /= weights.sum()
    return states, weights


def _tensor_hamiltonian_commutator(spec, tensor):
    # H real symmetric: R H acts on the primed system index like H does
    return apply_hamiltonian(spec, tensor, axis=0) - apply_hamiltonian(spec, tensor, axis=2)


@dataclass(frozen=True)
class TwoTimeResidual:
    slow_envelope: np.ndarray  # R_s, composite matrix
    absolute: float
    reference: float  # |[H, R_s]|

    @property
    def relative(self):
        return self.absolute / (self.reference + RESIDUAL_FLOOR)


def _interior_norm(tensor, density):
    s, c = density.system_grid, density.clock_grid
    return field_norm(tensor, [s, c, s, c], [0, RESIDUAL_MARGIN, 0, RESIDUAL_MARGIN])


def slow_envelope(density, clock):
    """R_s = exp(-i k_0 (q_c - q_c')) R."""
    n = density.system_grid.n
    carrier = np.tile(np.exp(-1j * carrier_wavenumber(clock) * density.clock_grid.points), n)
    return carrier[:, None] * density.values * np.conj(carrier)[None, :]


def slow_envelope_residuals(density, clock):
    """[H, R_s] - i hbar v (d/dq_c + d/dq_c') R_s over interior clock nodes."""
    check_dense_size(density.dim)
    r_s = slow_envelope(density, clock)
    n, m = density.system_grid.n, density.clock_grid.n
    tensor = r_s.reshape(n, m, n, m)
    commutator = _tensor_hamiltonian_commutator(density.spec, tensor)
    drift = derivative_field(tensor, density.clock_grid, order=1, axis=1)
    drift = drift + derivative_field(tensor, density.clock_grid, order=1, axis=3)
    residual = commutator - 1j * clock.hbar * clock_speed(clock) * drift
    return TwoTimeResidual(
        slow_envelope=r_s,
        absolute=_interior_norm(residual, density),
        reference=_interior_norm(commutator, density),
    )


def exact_commutator_residual(density, clock):
    """Relative norm of [H, R] - (hbar^2/2M)(d^2/dq_c^2 - d^2/dq_c'^2) R."""
    check_dense_size(density.dim)
    tensor = density.as_tensor()
    commutator = _tensor_hamiltonian_commutator(density.spec, tensor)
    kinetic = derivative_field(tensor, density.clock_grid, order=2, axis=1)
    kinetic = kinetic - derivative_field(tensor, density.clock_grid, order=2, axis=3)
    residual = commutator - (clock.hbar**2 / (2.0 * clock.mass)) * kinetic
    reference = _interior_norm(commutator, density)
    return _interior_norm(residual, density) / (reference + RESIDUAL_FLOOR)
