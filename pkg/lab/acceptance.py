"""
Acceptance suite behind `main.py check`

Ten criteria, each run on the desk-scale configs under `acceptance:` in
config/lab.yaml. Scenario-shaped criteria go through the scenario runners;
the rest call the library directly.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from clocks.free import FreeClock, phase_expansion_remainder
from clocks.potential import PolynomialClock, polynomial_momentum, wkb_correction_coefficient
from extended.diagnostics import clock_currents
from extended.solutions import complete_integral, forward_solution
from lab.config import ConfigError, defaults
from lab.scenarios import (
    at_most,
    build_basis,
    build_system,
    clock_window,
    decreasing,
    energy_ladder,
    rng_for,
    run_outcome,
    within,
)
from lab.schema import parse_scenario
from numerics.errors import ClockLabError
from numerics.grid import Grid
from numerics.linalg import HermitianMatrix, eigh
from numerics.numerov import numerov_solve
from quantum.basis import ModeAmplitudes, reconstruct
from quantum.potentials import Box, Constant, LinearRamp
from quantum.system import SystemSpec

logger = logging.getLogger(__name__)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    error: str = ""
    seconds: float = 0.0

    @property
    def passed(self):
        return not self.error and all(c.passed for c in self.checks)

    @property
    def failed_checks(self):
        return [c.name for c in self.checks if not c.passed]


def acceptance_block(name, settings=None):
    block = defaults(settings).get("acceptance", {}).get(name)
    if block is None:
        raise ConfigError(f"acceptance.{name} missing from the lab defaults")
    return block


def acceptance_config(name, scenario, scale=1.0, settings=None):
    data = {"scenario": scenario, **acceptance_block(name, settings)}
    data["run"] = {**data.get("run", {}), "tolerance_scale": scale}
    return parse_scenario(data, f"acceptance.{name}")


def _scenario_checks(name, scenario, scale, settings):
    return run_outcome(acceptance_config(name, scenario, scale, settings))


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------

def semiclassical_convergence(scale, settings=None):
    outcome = _scenario_checks("convergence", "convergence", scale, settings)
    errors = outcome.metrics["terminal_error"].to_numpy()
    checks = list(outcome.checks)
    checks.append(within("error_ratio", errors[-1] / errors[-2], 0.4, 0.6, scale))
    return checks


def phase_expansion_bound(scale, settings=None):
    config = acceptance_config("phase_bound", "convergence", scale, settings)
    basis = build_basis(config, build_system(config))
    worst = -np.inf
    for energy in energy_ladder(config, basis):
        clock = FreeClock(config.clock.mass, energy, config.system.hbar)
        for mode_energy in basis.energies[basis.energies <= 0.5 * energy]:
            remainder, bound = phase_expansion_remainder(clock, mode_energy)
            worst = max(worst, remainder - bound)
    return [at_most("remainder_over_bound", worst, 1e-12, scale)]


def clock_current_conservation(scale, settings=None):
    config = acceptance_config("current", "convergence", scale, settings)
    basis = build_basis(config, build_system(config))
    energy = float(energy_ladder(config, basis)[0])
    clock = FreeClock(config.clock.mass, energy, config.system.hbar)
    grid = clock_window(config, energy)
    rng = rng_for(config)

    def draw():
        c = rng.normal(size=basis.count) + 1j * rng.normal(size=basis.count)
        return c / np.linalg.norm(c)

    forward = draw()
    # weaker backward branch keeps the net current well away from zero
    both = complete_integral(ModeAmplitudes(forward), ModeAmplitudes(0.5 * draw()), basis, clock, grid)
    currents = clock_currents(both)[1:-1]
    spread = float(np.max(np.abs(currents - currents.mean())) / abs(currents.mean()))

    single = forward_solution(reconstruct(ModeAmplitudes(forward), basis), basis, clock, grid)
    k = np.sqrt(2.0 * clock.mass * (energy - basis.energies)) / clock.hbar
    expected = float(np.sum(np.abs(forward) ** 2 * k))
    measured = clock_currents(single)[1:-1]
    deviation = float(np.max(np.abs(measured - expected)) / expected)
    return [
        at_most("complete_integral_spread", spread, 1e-8, scale),
        at_most("forward_current_error", deviation, 1e-6, scale),
    ]


def exact_residual_refinement(scale, settings=None):
    outcome = _scenario_checks("refinement", "convergence", scale, settings)
    return [c for c in outcome.checks if c.name.startswith("refinement")]


def harmonic_clock(scale, settings=None):
    return _scenario_checks("harmonic", "harmonic-clock", scale, settings).checks


def mixed_states(scale, settings=None):
    return _scenario_checks("mixed", "mixed", scale, settings).checks


def two_time_structure(scale, settings=None):
    return _scenario_checks("mixed", "two-time", scale, settings).checks


def paraxial(scale, settings=None):
    return _scenario_checks("paraxial", "paraxial", scale, settings).checks


def finite_difference_coefficient(clock, q_c, step=1e-4):
    """Same coefficient with both derivatives taken by central differences."""
    slope = (polynomial_momentum(clock, q_c + step) - polynomial_momentum(clock, q_c - step)) / (2.0 * step)
    p0 = polynomial_momentum(clock, q_c)

    def reduced_velocity(p):
        return clock.velocity(p) / p

    bracket = (reduced_velocity(p0 + step) - reduced_velocity(p0 - step)) / (2.0 * step)
    return float(0.5 * slope * p0 * bracket)


def wkb_clock(scale, settings=None):
    checks = list(_scenario_checks("wkb", "wkb-clock", scale, settings).checks)
    quadratic = PolynomialClock(1.0, 0.0, LinearRamp(kappa=0.1), energy=1.0)
    flat = PolynomialClock(1.0, 0.01, Constant(value=0.3), energy=1.0)
    quartic = PolynomialClock(1.0, 0.01, LinearRamp(kappa=0.1), energy=1.0)
    analytic = wkb_correction_coefficient(quartic, 1.0)
    oracle = finite_difference_coefficient(quartic, 1.0)
    checks.extend([
        at_most("quadratic_coefficient", abs(wkb_correction_coefficient(quadratic, 1.0)), 0.0, scale),
        at_most("flat_potential_coefficient", abs(wkb_correction_coefficient(flat, 1.0)), 0.0, scale),
        at_most("quartic_oracle_error", abs(analytic - oracle) / abs(oracle), 1e-6, scale),
    ])
    return checks


def numerics_base_rates(scale, settings=None):
    block = acceptance_block("numerics", settings)
    grid = Grid(0.0, 1.0, block["box_points"])
    box = SystemSpec.from_potential(grid, Box(), label="box")
    matrix = HermitianMatrix(box.interior_matrix)
    decomposition = eigh(matrix)
    residual = float(np.max(decomposition.residuals(matrix)) / np.linalg.norm(matrix.entries, 2))
    ground_error = abs(decomposition.values[0] - np.pi**2 / 2.0) / (np.pi**2 / 2.0)

    energy, length = block["numerov_energy"], block["numerov_length"]
    k = np.sqrt(2.0 * energy)
    errors = []
    for step in block["numerov_steps"]:
        wave = Grid(0.0, length, int(round(length / step)) + 1)
        chi = numerov_solve(Box()(wave.points), energy, (1.0, np.cos(k * wave.h)), wave)
        errors.append(float(np.max(np.abs(chi - np.cos(k * wave.points)))))
    factors = np.asarray(errors[:-1]) / np.asarray(errors[1:])
    return [
        at_most("eigen_overlap_error", decomposition.overlap_error(), 1e-10, scale),
        at_most("eigen_residual", residual, 1e-9, scale),
        at_most("box_ground_energy_error", ground_error, 1e-3, scale),
        decreasing("numerov_error", errors),
        within("numerov_min_factor", float(np.min(factors)), 14.0, 18.0, scale),
        within("numerov_max_factor", float(np.max(factors)), 14.0, 18.0, scale),
    ]


CRITERIA = [
    (1, "semiclassical convergence", semiclassical_convergence),
    (2, "phase-expansion bound", phase_expansion_bound),
    (3, "clock-current conservation", clock_current_conservation),
    (4, "exact-residual refinement", exact_residual_refinement),
    (5, "harmonic clock", harmonic_clock),
    (6, "mixed states", mixed_states),
    (7, "two-time structure", two_time_structure),
    (8, "paraxial propagation", paraxial),
    (9, "WKB clock", wkb_clock),
    (10, "numerics base rates", numerics_base_rates),
]


def run_acceptance(only=None, scale=1.0, settings=None):
    """Run the selected criteria in order; errors fail the criterion, not the suite."""
    wanted = set(only) if only else {n for n, _, _ in CRITERIA}
    unknown = wanted - {n for n, _, _ in CRITERIA}
    if unknown:
        raise ConfigError(f"--only: no acceptance criterion {sorted(unknown)[0]}")
    results = []
    for number, title, criterion in CRITERIA:
        if number not in wanted:
            continue
        result = CriterionResult(number, title)
        start = time.perf_counter()
        try:
            result.checks = criterion(scale, settings)
        except ClockLabError as exc:
            logger.error("criterion %d (%s) raised: %s", number, title, exc)
            result.error = str(exc)
        result.seconds = time.perf_counter() - start
        logger.info("criterion %d %s in %.1fs", number, "passed" if result.passed else "FAILED", result.seconds)
        results.append(result)
    return results
