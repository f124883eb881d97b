"""Free-particle clock: wavenumbers, carrier, and the q_c <-> t map."""

from dataclasses import dataclass

import numpy as np

from numerics.errors import EvanescentModeError, ValidationError


@dataclass(frozen=True)
class FreeClock:
    """H_c = p_c^2 / 2M at total energy E."""

    mass: float
    energy: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("mass", "energy", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"free clock {name} must be positive, got {value}")


def clock_wavenumber(clock, mode_energy, mode=None):
    """k_n = sqrt(2M(E - E_n))/hbar for a propagating mode (E_n < E)."""
    if mode_energy >= clock.energy:
        raise EvanescentModeError(mode, float(mode_energy), clock.energy)
    return float(np.sqrt(2.0 * clock.mass * (clock.energy - mode_energy)) / clock.hbar)


def clock_wavenumbers(clock, mode_energies):
    return np.array([clock_wavenumber(clock, e, mode=i) for i, e in enumerate(mode_energies)])


def carrier_wavenumber(clock):
    """k_0 = sqrt(2ME)/hbar, the wavenumber of the fast carrier."""
    return float(np.sqrt(2.0 * clock.mass * clock.energy) / clock.hbar)


def clock_speed(clock):
    return float(np.sqrt(2.0 * clock.energy / clock.mass))


def time_map(clock, q_c):
    """t = q_c * sqrt(M / 2E)."""
    t = np.asarray(q_c, dtype=float) / clock_speed(clock)
    return float(t) if t.ndim == 0 else t


def clock_reading(clock, t):
    """Inverse of time_map."""
    q_c = np.asarray(t, dtype=float) * clock_speed(clock)
    return float(q_c) if q_c.ndim == 0 else q_c


def phase_expansion_remainder(clock, mode_energy):
    """Linearization error of k_n about E_n = 0, and its bound k_0 x^2 / 4.

    Returns (|k_n - (k_0 - E_n sqrt(M/2E)/hbar)|, k_0 * (E_n/E)^2 / 4). The bound
    holds for x = E_n/E in [0, 1/2].
    """
    k0 = carrier_wavenumber(clock)
    kn = clock_wavenumber(clock, mode_energy)
    linear = k0 - mode_energy * np.sqrt(clock.mass / (2.0 * clock.energy)) / clock.hbar
    x = mode_energy / clock.energy
    return abs(kn - linear), k0 * x**2 / 4.0
