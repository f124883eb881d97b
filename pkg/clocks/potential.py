"""Clocks moving in a potential: WKB momentum, clock speed and the tau variable.

PotentialClock carries the quadratic H_c = p^2/2M + U_c(q_c) sampled on its
clock grid. PolynomialClock adds a quartic term g p^4 and keeps U_c as a
catalog potential so p_0 and its q_c-derivative are available in closed form.
"""

import logging
from dataclasses import dataclass

import numpy as np

from numerics.errors import ValidationError
from numerics.grid import Grid, integrate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClockProfile:
    grid: Grid
    momentum: np.ndarray
    tau: np.ndarray
    speed: np.ndarray


@dataclass(frozen=True, eq=False)
class PotentialClock:
    mass: float
    energy: float
    grid: Grid
    potential: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise ValidationError("clock mass and hbar must be positive")
        u = np.array(self.potential, dtype=float)
        if u.ndim == 0:
            u = np.full(self.grid.n, float(u))
        if u.shape != (self.grid.n,):
            raise ValidationError(f"clock potential has shape {u.shape}, clock grid has {self.grid.n} nodes")
        forbidden = np.flatnonzero(~(self.energy - u > 0))
        if forbidden.size:
            i = int(forbidden[0])
            raise ValidationError(
                f"clock is classically forbidden at node {i} (q_c={self.grid.points[i]:.6g}): "
                f"E - U_c = {self.energy - u[i]:.6g}"
            )
        u.flags.writeable = False
        object.__setattr__(self, "potential", u)

    @classmethod
    def from_potential(cls, grid, potential, mass, energy, hbar=1.0):
        return cls(mass=mass, energy=energy, grid=grid, potential=potential(grid.points), hbar=hbar)

    def with_energy(self, energy):
        return PotentialClock(self.mass, energy, self.grid, self.potential, self.hbar)


@dataclass(frozen=True)
class PolynomialClock:
    """H_c = p^2/2M + quartic * p^4 + U_c(q_c)."""

    mass: float
    quartic: float
    potential: object
    energy: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise ValidationError("clock mass and hbar must be positive")

    def hamiltonian(self, p, q_c):
        return p**2 / (2.0 * self.mass) + self.quartic * p**4 + self.potential(q_c)

    def velocity(self, p):
        """dH_c/dp."""
        return p / self.mass + 4.0 * self.quartic * p**3

    def bracket(self, p):
        """d/dp [(1/p) dH_c/dp]."""
        return 8.0 * self.quartic * p


def wkb_momentum_and_tau(clock, grid=None):
    """p_0 = sqrt(2M(E - U_c)), speed p_0/M and tau = sqrt(M/2) * int dq_c / sqrt(E - U_c)."""
    if grid is not None and grid != clock.grid:
        raise ValidationError(f"clock lives on {clock.grid.describe()}, got {grid.describe()}")
    kinetic = clock.energy - clock.potential
    momentum = np.sqrt(2.0 * clock.mass * kinetic)
    speed = momentum / clock.mass
    tau = np.sqrt(clock.mass / 2.0) * integrate(1.0 / np.sqrt(kinetic), grid=clock.grid, mode="cumulative")
    return ClockProfile(grid=clock.grid, momentum=momentum, tau=tau, speed=speed)


def polynomial_momentum(clock, q_c):
    """Positive root p_0 of H_c(p_0, q_c) = E."""
    q = np.asarray(q_c, dtype=float)
    kinetic = clock.energy - clock.potential(q)
    a = 1.0 / (2.0 * clock.mass)
    disc = a**2 + 4.0 * clock.quartic * kinetic
    bad = np.flatnonzero(np.atleast_1d((kinetic <= 0) | (disc < 0)))
    if bad.size:
        where = np.atleast_1d(q)[bad[0]]
        raise ValidationError(f"no real positive momentum at q_c={where:.6g} for E={clock.energy}")
    # s = p_0^2 solves quartic*s^2 + a*s - K = 0; this form stays finite as quartic -> 0
    s = 2.0 * kinetic / (a + np.sqrt(disc))
    return np.sqrt(s)


def polynomial_momentum_and_tau(clock, grid):
    p0 = polynomial_momentum(clock, grid.points)
    speed = clock.velocity(p0)
    tau = integrate(1.0 / speed, grid=grid, mode="cumulative")
    return ClockProfile(grid=grid, momentum=p0, tau=tau, speed=speed)


def clock_profile(clock, grid=None):
    if isinstance(clock, PolynomialClock):
        if grid is None:
            raise ValidationError("a polynomial clock needs an explicit clock grid")
        return polynomial_momentum_and_tau(clock, grid)
    return wkb_momentum_and_tau(clock, grid)


def tau_between(profile, i, j):
    """Clock time elapsed from node i to node j."""
    return float(profile.tau[j] - profile.tau[i])


def momentum_slope(clock, q_c):
    """dp_0/dq_c from implicit differentiation of H_c(p_0(q_c), q_c) = E."""
    p0 = polynomial_momentum(clock, q_c)
    return -clock.potential.slope(q_c) / clock.velocity(p0)


def wkb_correction_coefficient(clock, q_c):
    """(1/2) dp_0/dq_c * p_0 * d/dp[(1/p) dH_c/dp] at p = p_0(q_c)."""
    p0 = polynomial_momentum(clock, q_c)
    coefficient = 0.5 * momentum_slope(clock, q_c) * p0 * clock.bracket(p0)
    return float(coefficient) if np.ndim(coefficient) == 0 else coefficient
