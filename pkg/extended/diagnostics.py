"""Clock current, envelopes and the residuals of the semiclassical reduction."""

import logging
from dataclasses import dataclass

import numpy as np

from clocks.free import carrier_wavenumber, clock_speed, time_map
from clocks.potential import wkb_momentum_and_tau
from numerics.errors import ValidationError
from numerics.grid import RESIDUAL_MARGIN, derivative_field, field_norm, integrate
from propagators.trajectory import Trajectory
from quantum.system import apply_hamiltonian

logger = logging.getLogger(__name__)

PSI_FLOOR = 1e-12


def clock_currents(state):
    """Im integral of conj(Psi) dPsi/dq_c dq at every clock node."""
    if state.clock_grid.n < 5:
        raise ValidationError("clock current needs at least 5 clock nodes")
    slope = derivative_field(state.values, state.clock_grid, order=1, axis=1)
    return integrate(slope, state.values, grid=state.system_grid, axis=0).imag


def clock_current(state, index):
    if not 0 < index < state.clock_grid.n - 1:
        raise ValidationError(f"clock current is defined at interior nodes only, got index {index}")
    return float(clock_currents(state)[index])


@dataclass(frozen=True)
class EnvelopeDiagnostics:
    envelope: np.ndarray
    ratio: np.ndarray
    exact_residual: np.ndarray
    reduced_residual: np.ndarray
    exact_norm: float
    reduced_norm: float
    reference_norm: float  # |H psi| over the same nodes

    @property
    def max_ratio(self):
        return float(np.max(self.ratio[:, RESIDUAL_MARGIN:-RESIDUAL_MARGIN]))

    @property
    def relative_reduced(self):
        return self.reduced_norm / max(self.reference_norm, 1e-14)


def envelope_and_residuals(state, clock):
    """Envelope psi = Psi exp(-i k_0 q_c) and the residuals of the reduced equation.

    exact:   i hbar v dpsi/dq_c + (hbar^2/2M) d^2psi/dq_c^2 - H psi   (zero in the continuum)
    reduced: i hbar v dpsi/dq_c - H psi
    """
    grids = [state.system_grid, state.clock_grid]
    margins = [0, RESIDUAL_MARGIN]
    hbar = clock.hbar
    carrier = np.exp(-1j * carrier_wavenumber(clock) * state.clock_grid.points)
    envelope = state.values * carrier

    slope = derivative_field(envelope, state.clock_grid, order=1, axis=1)
    curvature = derivative_field(envelope, state.clock_grid, order=2, axis=1)
    h_psi = apply_hamiltonian(state.spec, envelope, axis=0)

    drift = 1j * hbar * clock_speed(clock) * slope
    reduced = drift - h_psi
    exact = reduced + (hbar**2 / (2.0 * clock.mass)) * curvature

    ratio = np.abs(slope) / (np.maximum(np.abs(envelope), PSI_FLOOR) * 2.0 * carrier_wavenumber(clock))
    return EnvelopeDiagnostics(
        envelope=envelope,
        ratio=ratio,
        exact_residual=exact,
        reduced_residual=reduced,
        exact_norm=field_norm(exact, grids, margins),
        reduced_norm=field_norm(reduced, grids, margins),
        reference_norm=field_norm(h_psi, grids, margins),
    )


def reduction_constant(diagnostics):
    """C in |reduced residual| <= C * max ratio * |H psi|."""
    denom = diagnostics.max_ratio * diagnostics.reference_norm
    return diagnostics.reduced_norm / denom if denom > 0 else 0.0


def envelope_trajectory(state, clock):
    """Envelope slices indexed by t = time_map(q_c)."""
    envelope = state.values * np.exp(-1j * carrier_wavenumber(clock) * state.clock_grid.points)
    times = time_map(clock, state.clock_grid.points)
    return Trajectory(state.system_grid, times, envelope.T, kind="t", metadata={"source": state.metadata.get("kind")})


def wkb_envelope(state, clock):
    """psi = Psi sqrt(p_0(q_c)/p_0(q_min)) exp(-i int p_0 dq_c / hbar), indexed by q_c."""
    profile = wkb_momentum_and_tau(clock, state.clock_grid)
    p0 = profile.momentum
    phase = integrate(p0, grid=state.clock_grid, mode="cumulative") / clock.hbar
    factor = np.sqrt(p0 / p0[0]) * np.exp(-1j * phase)
    envelope = state.values * factor
    return Trajectory(state.system_grid, state.clock_grid.points, envelope.T, kind="q_c", metadata={"tau": profile.tau})
