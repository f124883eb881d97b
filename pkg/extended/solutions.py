"""Exact solutions of the extended time-independent equation.

With a free clock the equation separates: every retained subsystem mode
psi_n pairs with clock plane waves exp(+-i k_n q_c). With a clock in a
potential the clock factors are integrated numerically, mode by mode.
"""

import logging

import numpy as np

from clocks.free import clock_wavenumbers
from clocks.potential import wkb_momentum_and_tau
from extended.state import ExtendedState
from numerics.errors import ValidationError
from numerics.grid import integrate
from numerics.numerov import numerov_solve
from quantum.basis import ModeAmplitudes, project, reconstruct

logger = logging.getLogger(__name__)

DEFAULT_ETA = 0.5


def retain_for_clock(basis, clock, eta=DEFAULT_ETA):
    """Keep the modes with E_n <= eta * E."""
    keep = int(np.count_nonzero(basis.energies <= eta * clock.energy))
    if keep == 0:
        raise ValidationError(f"no mode satisfies E_n <= {eta} * E = {eta * clock.energy:.6g}")
    if keep < basis.count:
        logger.debug("clock at E=%.6g keeps %d of %d modes (eta=%g)", clock.energy, keep, basis.count, eta)
    return basis.truncated(keep)


def _check_aligned(amps, basis, name):
    if len(amps) != basis.count:
        raise ValidationError(f"{name} has {len(amps)} entries for a {basis.count}-mode basis")


def complete_integral(forward, backward, basis, clock, clock_grid):
    """Psi = sum_n psi_n(q) [A_n exp(i k_n q_c) + B_n exp(-i k_n q_c)]."""
    _check_aligned(forward, basis, "A")
    _check_aligned(backward, basis, "B")
    k = clock_wavenumbers(clock, basis.energies)
    phase = np.exp(1j * np.outer(k, clock_grid.points))
    factors = forward.coefficients[:, None] * phase + backward.coefficients[:, None] * np.conj(phase)
    values = basis.states @ factors
    return ExtendedState(
        spec=basis.spec,
        clock_grid=clock_grid,
        values=values,
        clock=clock,
        metadata={"kind": "complete_integral", "modes": basis.count, "wavenumbers": k},
    )


def forward_slope(psi0, basis, clock):
    """dPsi/dq_c at q_c = 0 for the forward-moving solution: sum i k_n c_n psi_n."""
    k = clock_wavenumbers(clock, basis.energies)
    c = project(psi0, basis).coefficients
    return reconstruct(ModeAmplitudes(1j * k * c), basis)


def forward_solution(psi0, basis, clock, clock_grid):
    c = project(psi0, basis)
    state = complete_integral(c, ModeAmplitudes(np.zeros(basis.count)), basis, clock, clock_grid)
    state.metadata["kind"] = "forward"
    return state


def initial_value_solution(psi0, slope0, basis, clock, clock_grid):
    """Cosine part from psi0, sine part from slope0 / k_n."""
    k = clock_wavenumbers(clock, basis.energies)
    c = project(psi0, basis).coefficients
    d = project(slope0, basis).coefficients
    # c cos(kq) + (d/k) sin(kq) = A e^{ikq} + B e^{-ikq}
    sine = d / (1j * k)
    state = complete_integral(ModeAmplitudes(0.5 * (c + sine)), ModeAmplitudes(0.5 * (c - sine)), basis, clock, clock_grid)
    state.metadata["kind"] = "initial_value"
    return state


def wkb_clock_mode(clock, mode_energy, mode=None):
    """Numerov clock factor at E_c = E - E_n, seeded with the WKB wave at the first two nodes.

    chi(q_min) = 1; the seed is sqrt(p(q_min)/p(q)) exp(i int p dq / hbar).
    """
    try:
        shifted = clock.with_energy(clock.energy - mode_energy)
    except ValidationError as exc:
        raise ValidationError(f"mode {mode} (E_n={mode_energy:.6g}): {exc}") from None
    profile = wkb_momentum_and_tau(shifted)
    p = profile.momentum
    phase = integrate(p, grid=clock.grid, mode="cumulative") / clock.hbar
    seeds = np.sqrt(p[0] / p[:2]) * np.exp(1j * phase[:2])
    chi = numerov_solve(clock.potential, shifted.energy, tuple(seeds), clock.grid, clock.mass, clock.hbar)
    return chi, p


def wkb_extended_solution(psi0, basis, clock, clock_grid=None):
    """Psi = sum_n c_n psi_n(q) chi_n(q_c) for a clock moving in U_c."""
    if clock_grid is not None and clock_grid != clock.grid:
        raise ValidationError(f"clock lives on {clock.grid.describe()}, got {clock_grid.describe()}")
    c = project(psi0, basis).coefficients
    factors = np.empty((basis.count, clock.grid.n), dtype=complex)
    momenta = []
    for n, energy in enumerate(basis.energies):
        chi, p = wkb_clock_mode(clock, energy, mode=n)
        factors[n] = c[n] * chi
        momenta.append(p)
    values = basis.states @ factors
    return ExtendedState(
        spec=basis.spec,
        clock_grid=clock.grid,
        values=values,
        clock=clock,
        metadata={"kind": "wkb", "modes": basis.count, "momenta": np.array(momenta)},
    )
