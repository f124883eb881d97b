"""Spectral evolution in the retained eigenbasis, in t or in the clock time tau."""

import logging

import numpy as np

from clocks.potential import clock_profile
from propagators.trajectory import Trajectory
from quantum.basis import out_of_span_tail, project

logger = logging.getLogger(__name__)

TAIL_WARNING = 1e-6


def _span_metadata(psi0, basis):
    tail = out_of_span_tail(psi0, basis)
    norm = psi0.norm()
    if norm > 0 and tail > TAIL_WARNING * norm:
        logger.warning("initial state leaves %.3e of its norm outside the %d retained modes", tail / norm, basis.count)
    return {"tail_norm": tail, "initial_norm": norm, "modes": basis.count}


def evolve_amplitudes(amps, basis, times):
    """Rows are sum_n c_n exp(-i E_n t / hbar) psi_n for each t."""
    phases = np.exp(-1j * np.outer(times, basis.energies) / basis.spec.hbar)
    return (phases * amps.coefficients) @ basis.states.T


def spectral_propagate(psi0, basis, times):
    times = np.asarray(times, dtype=float)
    amps = project(psi0, basis)
    states = evolve_amplitudes(amps, basis, times)
    return Trajectory(basis.grid, times, states, kind="t", metadata=_span_metadata(psi0, basis))


def tau_propagate(psi0, basis, clock, clock_grid=None):
    """Evolve to tau(q_c) at every clock node; the trajectory is indexed by q_c."""
    profile = clock_profile(clock, clock_grid)
    amps = project(psi0, basis)
    states = evolve_amplitudes(amps, basis, profile.tau)
    metadata = {**_span_metadata(psi0, basis), "tau": profile.tau}
    return Trajectory(basis.grid, profile.grid.points, states, kind="q_c", metadata=metadata)
