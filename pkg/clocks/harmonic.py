"""Harmonic-oscillator clock in the alpha (coherent-state) representation.

Clock states are labelled by the eigenvalue alpha of the lowering operator;
on the unit circle alpha = exp(-i omega tau) and tau is a real time.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from numerics.errors import DomainError, ValidationError
from numerics.grid import field_norm
from propagators.trajectory import Trajectory
from quantum.basis import WaveFunction, project
from quantum.system import apply_hamiltonian

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicClock:
    mass: float
    omega: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "omega", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"harmonic clock {name} must be positive, got {value}")

    @property
    def quantum(self):
        return self.hbar * self.omega


@dataclass(frozen=True, eq=False)
class LadderPair:
    dim: int
    a: np.ndarray
    a_dagger: np.ndarray

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError(f"ladder truncation needs dim >= 2, got {self.dim}")
        if self.a.shape != (self.dim, self.dim) or self.a_dagger.shape != (self.dim, self.dim):
            raise ValidationError("ladder matrices do not match the truncation size")

    def commutator(self):
        return self.a @ self.a_dagger - self.a_dagger @ self.a


def ladder_matrices(clock, dim):
    """Truncated a, a^dagger and H_c = hbar omega (a^dagger a + 1/2)."""
    if int(dim) != dim or dim < 2:
        raise ValidationError(f"ladder truncation needs dim >= 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    pair = LadderPair(dim=dim, a=a, a_dagger=a.conj().T)
    h_c = np.diag(clock.quantum * (np.arange(dim) + 0.5)).astype(complex)
    return pair, h_c


def heisenberg_rate(clock, pair, h_c):
    """(i/hbar)[H_c, a]; equals -i omega a on any truncation."""
    return (1j / clock.hbar) * (h_c @ pair.a - pair.a @ h_c)


def tau_of_alpha(clock, alpha):
    """tau = i Log(alpha) / omega on the principal branch."""
    if alpha == 0:
        raise DomainError("alpha = 0 has no clock time")
    return 1j * np.log(complex(alpha)) / clock.omega


def alpha_of_tau(clock, tau):
    return np.exp(-1j * clock.omega * tau)


@dataclass(frozen=True, eq=False)
class AlphaClockValue:
    alpha: complex
    tau: complex
    state: WaveFunction
    metadata: dict = field(default_factory=dict)

    @property
    def on_circle(self):
        return self.metadata.get("on_circle", True)


def alpha_clock_state(psi_of_tau, clock, energy, alpha):
    """Psi(q, alpha) = psi(q, tau(alpha)) * alpha^(-E/(hbar omega) - 1/2)."""
    tau = tau_of_alpha(clock, alpha)
    on_circle = abs(abs(alpha) - 1.0) <= UNIT_CIRCLE_TOL
    if not on_circle:
        logger.warning("alpha=%s is off the unit circle; tau=%s is complex", alpha, tau)
    psi = psi_of_tau(tau.real if on_circle else tau)
    exponent = -energy / clock.quantum - 0.5
    factor = np.exp(exponent * np.log(complex(alpha)))
    state = WaveFunction(psi.grid, psi.values * factor)
    return AlphaClockValue(alpha=complex(alpha), tau=tau, state=state, metadata={"on_circle": on_circle})


def log_alpha_residual(psi_of_tau, spec, clock, energy, tau, step=1e-3):
    """Relative residual of hbar omega dPsi/dln(alpha) = (H - E - hbar omega/2) Psi.

    The ln(alpha) derivative is a central difference along the unit circle,
    alpha(tau +- step), so d ln(alpha) = -2 i omega step.
    """
    plus = alpha_clock_state(psi_of_tau, clock, energy, alpha_of_tau(clock, tau + step)).state.values
    minus = alpha_clock_state(psi_of_tau, clock, energy, alpha_of_tau(clock, tau - step)).state.values
    centre = alpha_clock_state(psi_of_tau, clock, energy, alpha_of_tau(clock, tau)).state.values

    lhs = clock.quantum * (plus - minus) / (-2j * clock.omega * step)
    rhs = apply_hamiltonian(spec, centre) - (energy + 0.5 * clock.quantum) * centre
    scale = field_norm(rhs, [spec.grid])
    return field_norm(lhs - rhs, [spec.grid]) / max(scale, 1e-14)


def unwrapped_log(alphas):
    """ln(alpha) with the phase accumulated continuously along the sequence."""
    alphas = np.asarray(alphas, dtype=complex)
    if np.any(alphas == 0):
        raise DomainError("alpha = 0 has no clock time")
    return np.log(np.abs(alphas)) + 1j * np.unwrap(np.angle(alphas))


def alpha_trajectory(psi0, basis, clock, alphas):
    """psi(alpha) = sum_n c_n psi_n alpha^(E_n / hbar omega) along a unit-circle sweep.

    The sweep must run clockwise (tau increasing). The logarithm is unwrapped
    so the sweep may wind past the branch cut.
    """
    alphas = np.asarray(alphas, dtype=complex)
    off = np.flatnonzero(np.abs(np.abs(alphas) - 1.0) > UNIT_CIRCLE_TOL)
    if off.size:
        raise DomainError(f"alpha[{off[0]}] = {alphas[off[0]]} is off the unit circle")
    log_alpha = unwrapped_log(alphas)
    taus = (1j * log_alpha / clock.omega).real

    amps = project(psi0, basis).coefficients
    phases = np.exp(np.outer(log_alpha, basis.energies / clock.quantum))
    states = (phases * amps) @ basis.states.T
    return Trajectory(basis.grid, taus, states, kind="tau", metadata={"alphas": alphas})
