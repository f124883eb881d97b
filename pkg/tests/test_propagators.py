import numpy as np
import pytest

from clocks.free import FreeClock, time_map
from clocks.potential import PotentialClock
from numerics.errors import ValidationError
from numerics.grid import Grid
from propagators.paraxial import (
    ParaxialSpec,
    free_gaussian,
    gaussian_width,
    gaussian_width_law,
    paraxial_propagate,
)
from propagators.spectral import spectral_propagate, tau_propagate
from propagators.trajectory import Trajectory, compare_trajectories
from quantum.basis import gaussian_packet, spectral_basis
from quantum.potentials import Box, Harmonic
from quantum.system import SystemSpec


# ============================================================================
# Trajectories
# ============================================================================

def test_trajectory_rejects_unsorted_parameters(unit_box):
    grid = unit_box.grid
    with pytest.raises(ValidationError):
        Trajectory(grid, [0.0, 0.2, 0.1], np.zeros((3, grid.n)))
    with pytest.raises(ValidationError):
        Trajectory(grid, [0.0], np.zeros((1, grid.n)), kind="x")


def test_global_phase_is_removed(box_basis):
    traj = spectral_propagate(box_basis.state(0), box_basis, np.linspace(0.0, 1.0, 5))
    rotated = Trajectory(traj.grid, traj.parameters, traj.states * np.exp(0.7j), kind="t")
    aligned = compare_trajectories(traj, rotated)
    raw = compare_trajectories(traj, rotated, phase_mode="raw")
    np.testing.assert_allclose(aligned.l2_error, 0.0, atol=1e-12)
    np.testing.assert_allclose(aligned.fidelity, 0.0, atol=1e-12)
    assert raw.terminal_error == pytest.approx(abs(1 - np.exp(0.7j)), rel=1e-10)


def test_comparison_needs_matching_samples(box_basis):
    a = spectral_propagate(box_basis.state(0), box_basis, [0.0, 1.0])
    b = spectral_propagate(box_basis.state(0), box_basis, [0.0, 2.0])
    with pytest.raises(ValidationError):
        compare_trajectories(a, b)
    with pytest.raises(ValidationError):
        compare_trajectories(a, a, phase_mode="loose")


# ============================================================================
# Spectral evolution
# ============================================================================

def test_spectral_propagation_is_unitary(box_basis):
    psi0 = gaussian_packet(box_basis.grid, 0.5, 0.1)
    traj = spectral_propagate(psi0, box_basis, np.linspace(0.0, 2.0, 21))
    np.testing.assert_allclose(traj.norms(), traj.norms()[0], atol=1e-12)
    assert traj.metadata["tail_norm"] > 0


def test_stationary_state_only_rotates(box_basis):
    traj = spectral_propagate(box_basis.state(2), box_basis, [0.0, 0.3])
    expected = box_basis.states[:, 2] * np.exp(-1j * box_basis.energies[2] * 0.3)
    np.testing.assert_allclose(traj.states[1], expected, atol=1e-12)


def test_tail_warning_is_logged(box_basis, caplog):
    with caplog.at_level("WARNING"):
        spectral_propagate(gaussian_packet(box_basis.grid, 0.5, 0.02), box_basis, [0.0, 0.1])
    assert "outside the 4 retained modes" in caplog.text


def test_oscillator_revival():
    spec = SystemSpec.from_potential(Grid(-8.0, 8.0, 1201), Harmonic())
    basis = spectral_basis(spec, 20)
    psi0 = gaussian_packet(spec.grid, 0.3, np.sqrt(0.5))
    traj = spectral_propagate(psi0, basis, [0.0, np.pi, 2 * np.pi])
    start = Trajectory(traj.grid, [2 * np.pi], traj.states[:1], kind="t")
    end = Trajectory(traj.grid, [2 * np.pi], traj.states[-1:], kind="t")
    assert compare_trajectories(start, end).worst_fidelity <= 1e-8


def test_tau_propagation_with_flat_clock_uses_time_map(box_basis):
    grid = Grid(0.0, 2.0, 81)
    psi0 = gaussian_packet(box_basis.grid, 0.5, 0.1)
    traj = tau_propagate(psi0, box_basis, PotentialClock(1.0, 8.0, grid, 0.0))
    reference = spectral_propagate(psi0, box_basis, time_map(FreeClock(1.0, 8.0), grid.points))
    assert traj.kind == "q_c"
    np.testing.assert_array_equal(traj.parameters, grid.points)
    np.testing.assert_allclose(traj.states, reference.states, atol=1e-12)


def test_tau_propagation_with_constant_clock_potential(box_basis):
    grid = Grid(0.0, 2.0, 81)
    psi0 = gaussian_packet(box_basis.grid, 0.5, 0.1)
    lifted = tau_propagate(psi0, box_basis, PotentialClock(1.0, 10.0, grid, 2.0))
    free = tau_propagate(psi0, box_basis, PotentialClock(1.0, 8.0, grid, 0.0))
    np.testing.assert_allclose(lifted.states, free.states, atol=1e-12)
    np.testing.assert_allclose(lifted.metadata["tau"], free.metadata["tau"], atol=1e-14)


# ============================================================================
# Paraxial propagation
# ============================================================================

def test_paraxial_beam_spreads_like_a_free_gaussian():
    transverse = SystemSpec.from_potential(Grid(-10.0, 10.0, 801), Box())
    paraxial = ParaxialSpec(transverse, energy=50.0, z_grid=Grid(0.0, 10.0, 11))
    sigma0 = 0.5
    psi0 = free_gaussian(transverse.grid, sigma0, 0.0)
    traj = paraxial_propagate(paraxial, psi0)
    assert traj.kind == "z"

    t = traj.metadata["effective_time"]
    np.testing.assert_allclose(t, traj.parameters / np.sqrt(100.0))
    widths = np.array([gaussian_width(traj.sample(i)) for i in range(len(traj))])
    np.testing.assert_allclose(widths, gaussian_width_law(sigma0, t), rtol=1e-2)
    assert np.max(np.abs(traj.norms() - traj.norms()[0])) <= 1e-8


def test_free_gaussian_matches_width_law():
    grid = Grid(-20.0, 20.0, 2001)
    state = free_gaussian(grid, 0.7, 1.5)
    assert state.norm() == pytest.approx(1.0, abs=1e-10)
    assert gaussian_width(state) == pytest.approx(gaussian_width_law(0.7, 1.5), rel=1e-8)


def test_static_driving_matches_static_path():
    transverse = SystemSpec.from_potential(Grid(-3.0, 3.0, 41), Harmonic())
    z_grid = Grid(0.0, 2.0, 5)
    psi0 = gaussian_packet(transverse.grid, 0.4, 0.6)
    static = paraxial_propagate(ParaxialSpec(transverse, 8.0, z_grid), psi0)
    driven = paraxial_propagate(
        ParaxialSpec(transverse, 8.0, z_grid, driving=lambda x, z: 0.5 * x**2), psi0
    )
    np.testing.assert_allclose(driven.states, static.states, atol=1e-10)


def test_uniform_driving_shift_is_a_phase():
    transverse = SystemSpec.from_potential(Grid(-3.0, 3.0, 41), Harmonic())
    z_grid = Grid(0.0, 2.0, 5)
    psi0 = gaussian_packet(transverse.grid, 0.4, 0.6)
    static = paraxial_propagate(ParaxialSpec(transverse, 8.0, z_grid), psi0)
    shifted = ParaxialSpec(transverse, 8.0, z_grid, driving=lambda x, z: 0.5 * x**2 + 0.3 * z)
    driven = paraxial_propagate(shifted, psi0)
    # integral of 0.3 z dt with dt = dz / speed; midpoint sampling is exact for a linear shift
    phase = np.exp(-1j * 0.15 * z_grid.points**2 / shifted.speed)
    np.testing.assert_allclose(driven.states, static.states * phase[:, None], atol=1e-10)


def test_moving_driving_converges_with_z_refinement():
    transverse = SystemSpec.from_potential(Grid(-4.0, 4.0, 41), Harmonic())
    psi0 = gaussian_packet(transverse.grid, 0.0, 0.7)

    def driving(x, z):
        return 0.5 * (x - 0.3 * np.sin(z)) ** 2

    def end_state(n):
        spec = ParaxialSpec(transverse, 8.0, Grid(0.0, 2.0, n), driving=driving)
        return paraxial_propagate(spec, psi0).states[-1]

    reference = end_state(641)
    coarse = np.max(np.abs(end_state(21) - reference))
    fine = np.max(np.abs(end_state(81) - reference))
    assert fine < coarse / 8
    assert fine <= 1e-4


def test_paraxial_rejects_bad_energy_and_driving():
    transverse = SystemSpec.from_potential(Grid(-3.0, 3.0, 41), Harmonic())
    with pytest.raises(ValidationError):
        ParaxialSpec(transverse, 0.0, Grid(0.0, 1.0, 5))
    driving = ParaxialSpec(transverse, 8.0, Grid(0.0, 1.0, 5), driving=lambda x, z: np.full_like(x, np.nan))
    with pytest.raises(ValidationError):
        paraxial_propagate(driving, gaussian_packet(transverse.grid))
