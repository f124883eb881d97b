import numpy as np
import pytest

from clocks.free import (
    FreeClock,
    carrier_wavenumber,
    clock_reading,
    clock_speed,
    clock_wavenumber,
    phase_expansion_remainder,
    time_map,
)
from clocks.harmonic import (
    HarmonicClock,
    alpha_clock_state,
    alpha_of_tau,
    alpha_trajectory,
    heisenberg_rate,
    ladder_matrices,
    log_alpha_residual,
    tau_of_alpha,
    unwrapped_log,
)
from clocks.potential import (
    PolynomialClock,
    PotentialClock,
    clock_profile,
    polynomial_momentum,
    polynomial_momentum_and_tau,
    tau_between,
    wkb_correction_coefficient,
    wkb_momentum_and_tau,
)
from numerics.errors import DomainError, EvanescentModeError, ValidationError
from numerics.grid import Grid
from propagators.spectral import evolve_amplitudes, spectral_propagate
from quantum.basis import WaveFunction, gaussian_packet, project, spectral_basis
from quantum.potentials import Constant, LinearRamp


# ============================================================================
# Free clock
# ============================================================================

def test_clock_wavenumber_examples():
    clock = FreeClock(mass=2.0, energy=1.0)
    assert clock_wavenumber(clock, 0.0) == pytest.approx(2.0)
    assert clock_wavenumber(clock, 0.5) == pytest.approx(np.sqrt(2.0))
    with pytest.raises(EvanescentModeError) as info:
        clock_wavenumber(clock, 1.5, mode=3)
    assert info.value.mode == 3


def test_time_map_examples():
    assert time_map(FreeClock(2.0, 1.0), 0.7) == pytest.approx(0.7)
    assert time_map(FreeClock(8.0, 1.0), 1.0) == pytest.approx(2.0)
    clock = FreeClock(1.3, 4.2)
    q = np.linspace(0.0, 5.0, 11)
    np.testing.assert_allclose(clock_reading(clock, time_map(clock, q)), q, atol=1e-13)


def test_carrier_and_speed():
    clock = FreeClock(1.0, 50.0)
    assert carrier_wavenumber(clock) == pytest.approx(10.0)
    assert clock_speed(clock) == pytest.approx(10.0)


def test_free_clock_rejects_nonpositive_energy():
    with pytest.raises(ValidationError):
        FreeClock(1.0, 0.0)


@pytest.mark.parametrize("x", [0.0, 0.05, 0.2, 0.5])
def test_phase_expansion_bound(x):
    clock = FreeClock(1.7, 30.0, hbar=0.8)
    remainder, bound = phase_expansion_remainder(clock, x * clock.energy)
    assert remainder <= bound + 1e-12


# ============================================================================
# Potential clocks
# ============================================================================

def test_flat_clock_tau_is_time_map():
    grid = Grid(0.0, 3.0, 301)
    clock = PotentialClock(mass=1.0, energy=2.0, grid=grid, potential=0.0)
    profile = wkb_momentum_and_tau(clock)
    np.testing.assert_allclose(profile.tau, time_map(FreeClock(1.0, 2.0), grid.points), atol=1e-12)


def test_half_energy_plateau():
    grid = Grid(0.0, 2.0, 201)
    clock = PotentialClock(mass=1.0, energy=1.0, grid=grid, potential=0.5)
    profile = wkb_momentum_and_tau(clock, grid)
    np.testing.assert_allclose(profile.momentum, 1.0)
    np.testing.assert_allclose(profile.tau, grid.points, atol=1e-12)


def test_ramp_tau_closed_form():
    grid = Grid(0.0, 5.0, 2001)
    clock = PotentialClock.from_potential(grid, LinearRamp(kappa=0.1), mass=1.0, energy=1.0)
    profile = wkb_momentum_and_tau(clock)
    exact = np.sqrt(0.5) * (2 / 0.1) * (1.0 - np.sqrt(1.0 - 0.1 * grid.points))
    np.testing.assert_allclose(profile.tau, exact, atol=1e-6)
    assert tau_between(profile, 0, grid.n - 1) == pytest.approx(profile.tau[-1])
    assert tau_between(profile, 100, 500) == pytest.approx(exact[500] - exact[100], abs=2e-6)
    assert np.all(profile.speed > 0)


def test_forbidden_region_names_node():
    grid = Grid(0.0, 5.0, 51)
    with pytest.raises(ValidationError, match="node 23"):
        PotentialClock.from_potential(grid, LinearRamp(kappa=0.45), mass=1.0, energy=1.0)


def test_quadratic_polynomial_clock_matches_wkb():
    grid = Grid(0.0, 5.0, 501)
    ramp = LinearRamp(kappa=0.1)
    polynomial = polynomial_momentum_and_tau(PolynomialClock(1.0, 0.0, ramp, energy=1.0), grid)
    wkb = wkb_momentum_and_tau(PotentialClock.from_potential(grid, ramp, 1.0, 1.0))
    np.testing.assert_allclose(polynomial.momentum, wkb.momentum, rtol=1e-12)
    np.testing.assert_allclose(polynomial.tau, wkb.tau, rtol=1e-12)


def test_quartic_momentum_solves_dispersion():
    clock = PolynomialClock(1.0, 0.01, LinearRamp(kappa=0.1), energy=1.0)
    q = np.linspace(0.0, 5.0, 6)
    p0 = polynomial_momentum(clock, q)
    np.testing.assert_allclose(clock.hamiltonian(p0, q), 1.0, atol=1e-13)
    with pytest.raises(ValidationError):
        polynomial_momentum(clock, 20.0)


def test_clock_profile_needs_grid_for_polynomial_clock():
    with pytest.raises(ValidationError):
        clock_profile(PolynomialClock(1.0, 0.01, LinearRamp(kappa=0.1), energy=1.0))


def test_correction_coefficient_vanishes_for_quadratic_and_flat_clocks():
    assert wkb_correction_coefficient(PolynomialClock(1.0, 0.0, LinearRamp(kappa=0.1), energy=1.0), 1.0) == 0.0
    assert wkb_correction_coefficient(PolynomialClock(1.0, 0.01, Constant(0.3), energy=1.0), 1.0) == 0.0


def test_correction_coefficient_matches_finite_differences():
    clock = PolynomialClock(1.0, 0.01, LinearRamp(kappa=0.1), energy=1.0)
    step = 1e-4
    slope = (polynomial_momentum(clock, 1.0 + step) - polynomial_momentum(clock, 1.0 - step)) / (2 * step)
    p0 = polynomial_momentum(clock, 1.0)
    bracket = (clock.velocity(p0 + step) / (p0 + step) - clock.velocity(p0 - step) / (p0 - step)) / (2 * step)
    oracle = 0.5 * slope * p0 * bracket
    assert wkb_correction_coefficient(clock, 1.0) == pytest.approx(oracle, rel=1e-6)


# ============================================================================
# Harmonic clock
# ============================================================================

def test_ladder_matrices_dim_four():
    pair, h_c = ladder_matrices(HarmonicClock(1.0, 2.0), 4)
    np.testing.assert_allclose(np.diag(pair.a, 1), [1, np.sqrt(2), np.sqrt(3)])
    np.testing.assert_allclose(pair.commutator(), np.diag([1, 1, 1, -3]), atol=1e-14)
    np.testing.assert_allclose(np.diag(h_c).real, 2.0 * (np.arange(4) + 0.5))
    np.testing.assert_array_equal(pair.a_dagger, pair.a.conj().T)


@pytest.mark.parametrize("dim", [2, 7, 32])
def test_heisenberg_rate(dim):
    clock = HarmonicClock(1.0, 1.3, hbar=0.7)
    pair, h_c = ladder_matrices(clock, dim)
    np.testing.assert_allclose(heisenberg_rate(clock, pair, h_c), -1j * clock.omega * pair.a, atol=1e-12)


def test_ladder_rejects_tiny_truncation():
    with pytest.raises(ValidationError):
        ladder_matrices(HarmonicClock(1.0, 1.0), 1)


def test_tau_of_alpha():
    clock = HarmonicClock(1.0, 1.0)
    assert tau_of_alpha(clock, 1.0) == 0
    assert abs(tau_of_alpha(clock, np.exp(-1j)) - 1.0) <= 1e-12
    with pytest.raises(DomainError):
        tau_of_alpha(clock, 0.0)


def test_unwrapped_log_crosses_branch_cut():
    clock = HarmonicClock(1.0, 1.0)
    taus = np.linspace(0.0, 8.0, 81)
    np.testing.assert_allclose((1j * unwrapped_log(alpha_of_tau(clock, taus))).real, taus, atol=1e-12)


def _single_mode(oscillator):
    basis = spectral_basis(oscillator, 1)

    def psi_of_tau(tau):
        return WaveFunction(basis.grid, np.exp(-1j * basis.energies[0] * tau) * basis.states[:, 0])

    return basis, psi_of_tau


def test_log_alpha_residual_single_mode(oscillator):
    clock = HarmonicClock(1.0, 1.0)
    _, psi_of_tau = _single_mode(oscillator)
    for tau in (0.0, 0.4, 1.7):
        assert log_alpha_residual(psi_of_tau, oscillator, clock, 2.0, tau, step=1e-3) <= 1e-5


def test_off_circle_alpha_warns(oscillator, caplog):
    clock = HarmonicClock(1.0, 1.0)
    _, psi_of_tau = _single_mode(oscillator)
    value = alpha_clock_state(psi_of_tau, clock, 2.0, np.exp(-0.3j))
    assert value.on_circle
    with caplog.at_level("WARNING"):
        assert not alpha_clock_state(psi_of_tau, clock, 2.0, 0.9 * np.exp(-0.3j)).on_circle
    assert "off the unit circle" in caplog.text


def test_alpha_trajectory_matches_spectral(oscillator):
    clock = HarmonicClock(1.0, 1.0)
    basis = spectral_basis(oscillator, 6)
    psi0 = gaussian_packet(oscillator.grid, 0.5, 0.8)
    traj = alpha_trajectory(psi0, basis, clock, alpha_of_tau(clock, np.linspace(0.0, 6.0, 31)))
    reference = spectral_propagate(psi0, basis, traj.parameters)
    np.testing.assert_allclose(traj.states, reference.states, atol=1e-10)
    with pytest.raises(DomainError):
        alpha_trajectory(psi0, basis, clock, [1.0, 0.5j])


def test_alpha_state_agrees_with_spectral_evolution(oscillator):
    clock = HarmonicClock(1.0, 1.0)
    basis = spectral_basis(oscillator, 4)
    amps = project(gaussian_packet(oscillator.grid, 0.3, 0.8), basis)
    tau = 0.9
    value = alpha_clock_state(
        lambda t: WaveFunction(basis.grid, evolve_amplitudes(amps, basis, [t])[0]), clock, 1.0, alpha_of_tau(clock, tau)
    )
    expected = evolve_amplitudes(amps, basis, [tau])[0] * np.exp(1j * (1.0 + 0.5) * tau)
    np.testing.assert_allclose(value.state.values, expected, atol=1e-12)
