"""Named experiments binding the library operations to scenario configs.

Each runner takes a validated ScenarioConfig and returns a ScenarioOutcome:
one metrics row per energy (or sample), a headline summary, plot curves and
the pass/fail checks the run is judged by.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from clocks.free import FreeClock
from clocks.harmonic import (
    HarmonicClock,
    alpha_of_tau,
    alpha_trajectory,
    heisenberg_rate,
    ladder_matrices,
    log_alpha_residual,
)
from clocks.potential import (
    PolynomialClock,
    PotentialClock,
    tau_between,
    wkb_correction_coefficient,
    wkb_momentum_and_tau,
)
from extended.diagnostics import (
    envelope_and_residuals,
    envelope_trajectory,
    reduction_constant,
    wkb_envelope,
)
from extended.solutions import forward_solution, retain_for_clock, wkb_extended_solution
from lab.config import ConfigError, numeric_default
from mixed.conditional import (
    conditional_family,
    implied_density_residual,
    reduced_density_residual,
    von_neumann_residual,
)
from mixed.density import (
    ensemble_density,
    exact_commutator_residual,
    is_positive_semidefinite,
    purity,
    random_ensemble,
    slow_envelope_residuals,
)
from numerics.errors import ValidationError
from numerics.grid import Grid
from propagators.paraxial import ParaxialSpec, gaussian_width, gaussian_width_law, paraxial_propagate
from propagators.spectral import TAIL_WARNING, evolve_amplitudes, spectral_propagate, tau_propagate
from propagators.trajectory import compare_trajectories
from quantum.basis import ModeAmplitudes, WaveFunction, gaussian_packet, out_of_span_tail, project, reconstruct, spectral_basis
from quantum.potentials import make_potential
from quantum.system import SystemSpec, hamiltonian_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: str
    passed: bool

    def as_dict(self):
        return {"name": self.name, "value": float(self.value), "limit": self.limit, "passed": bool(self.passed)}


def at_most(name, value, limit, scale=1.0):
    return Check(name, float(value), f"<= {limit * scale:.3g}", bool(value <= limit * scale))


def at_least(name, value, limit, scale=1.0):
    # scale tightens toward 1 - (1 - limit) * scale, e.g. fidelity floors
    floor = 1.0 - (1.0 - limit) * scale
    return Check(name, float(value), f">= {floor:.6g}", bool(value >= floor))


def within(name, value, low, high, scale=1.0):
    centre, half = 0.5 * (low + high), 0.5 * (high - low) * scale
    return Check(name, float(value), f"in [{centre - half:.3g}, {centre + half:.3g}]", bool(abs(value - centre) <= half))


def decreasing(name, values):
    values = np.asarray(values, dtype=float)
    worst = float(np.max(np.diff(values))) if len(values) > 1 else 0.0
    return Check(name, worst, "strictly decreasing", bool(np.all(np.diff(values) < 0)))


@dataclass
class ScenarioOutcome:
    metrics: pd.DataFrame
    summary: dict
    curves: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_grid(block):
    return Grid(block.q_min, block.q_max, block.n)


def build_potential(block, path):
    try:
        return make_potential(block.name, **block.params)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_system(config):
    grid = build_grid(config.system.grid)
    potential = build_potential(config.system.potential, "system.potential")
    return SystemSpec.from_potential(grid, potential, config.system.mass, config.system.hbar, config.scenario)


def build_basis(config, spec):
    try:
        return spectral_basis(spec, config.modes.count)
    except ValidationError as exc:
        raise ConfigError(f"modes.count: {exc}") from None


def energy_ladder(config, basis):
    ladder = np.array(config.clock.ladder(), dtype=float)
    if config.clock.energy_unit == "top_mode":
        ladder = ladder * basis.energies[-1]
    return ladder


def rng_for(config):
    seed = config.run.seed if config.run.seed is not None else numeric_default("seed")
    return np.random.default_rng(seed)


def eta_for(config):
    return config.modes.eta if config.modes.eta is not None else numeric_default("eta")


def initial_state(config, basis, rng=None):
    init = config.modes.initial
    grid = basis.grid
    if init.kind == "mode":
        if init.mode >= basis.count:
            raise ConfigError(f"modes.initial.mode: {init.mode} is not among the {basis.count} retained modes")
        return basis.state(init.mode)
    if init.kind == "random":
        rng = rng or rng_for(config)
        c = rng.normal(size=basis.count) + 1j * rng.normal(size=basis.count)
        return reconstruct(ModeAmplitudes(c / np.linalg.norm(c)), basis)
    center = init.center if init.center is not None else 0.5 * (grid.q_min + grid.q_max)
    return gaussian_packet(grid, center, init.width, init.momentum, config.system.hbar)


def clock_window(config, energy):
    """Clock grid covering t in [0, t_max] at the free-clock speed."""
    speed = np.sqrt(2.0 * energy / config.clock.mass)
    return Grid(0.0, config.run.t_max * speed, config.run.clock_points)


def _tail_warning(psi0, basis, warnings):
    tail = out_of_span_tail(psi0, basis)
    if tail > TAIL_WARNING * psi0.norm():
        msg = f"initial state has out-of-span tail {tail:.3e} with {basis.count} modes"
        logger.warning(msg)
        warnings.append(msg)
    return tail


def _ratios(values):
    values = np.asarray(values, dtype=float)
    return values[1:] / values[:-1]


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

def run_convergence(config):
    spec = build_system(config)
    full = build_basis(config, spec)
    scale = config.run.tolerance_scale
    rows, warnings = [], []
    for energy in energy_ladder(config, full):
        clock = FreeClock(config.clock.mass, energy, config.system.hbar)
        basis = retain_for_clock(full, clock, eta_for(config))
        psi0 = initial_state(config, basis)
        tail = _tail_warning(psi0, basis, warnings)
        state = forward_solution(psi0, basis, clock, clock_window(config, energy))

        envelope = envelope_trajectory(state, clock)
        reference = spectral_propagate(psi0, basis, envelope.parameters)
        comparison = compare_trajectories(reference, envelope)
        diag = envelope_and_residuals(state, clock)
        rows.append({
            "energy": energy,
            "modes": basis.count,
            "terminal_error": comparison.terminal_error,
            "max_fidelity_error": comparison.worst_fidelity,
            "exact_residual": diag.exact_norm,
            "reduced_residual": diag.reduced_norm,
            "relative_reduced": diag.relative_reduced,
            "max_ratio": diag.max_ratio,
            "reduction_constant": reduction_constant(diag),
            "tail_norm": tail,
        })
    metrics = pd.DataFrame(rows)

    summary = dict(rows[-1])
    checks = []
    if len(rows) > 1:
        summary["error_ratio"] = float(_ratios(metrics["terminal_error"])[-1])
        checks.append(decreasing("terminal_error", metrics["terminal_error"]))
    curves = {"terminal_error": (metrics["energy"].to_numpy(), metrics["terminal_error"].to_numpy())}

    if config.run.refinements:
        norms, points = refinement_study(config, spec, full, energy_ladder(config, full)[0])
        ratios = _ratios(norms) ** -1
        summary["refinement_min_ratio"] = float(np.min(ratios))
        summary["refinement_max_ratio"] = float(np.max(ratios))
        curves["exact_residual_refinement"] = (points, norms)
        checks.append(within("refinement_min_ratio", np.min(ratios), 3.5, 4.5, scale))
        checks.append(within("refinement_max_ratio", np.max(ratios), 3.5, 4.5, scale))
    return ScenarioOutcome(metrics, summary, curves, checks, warnings)


def refinement_study(config, spec, full, energy):
    """Exact-residual norms on successively halved clock grids."""
    clock = FreeClock(config.clock.mass, energy, config.system.hbar)
    basis = retain_for_clock(full, clock, eta_for(config))
    psi0 = initial_state(config, basis)
    grid = clock_window(config, energy)
    norms, points = [], []
    for _ in range(config.run.refinements + 1):
        state = forward_solution(psi0, basis, clock, grid)
        norms.append(envelope_and_residuals(state, clock).exact_norm)
        points.append(grid.n)
        grid = grid.refined()
    return np.array(norms), np.array(points, dtype=float)


def run_wkb_clock(config):
    if config.clock.type != "potential":
        raise ConfigError("clock.type: the wkb-clock scenario needs a potential clock")
    spec = build_system(config)
    full = build_basis(config, spec)
    scale = config.run.tolerance_scale
    ramp = build_potential(config.clock.potential, "clock.potential")
    rows, warnings = [], []
    for energy in energy_ladder(config, full):
        grid = clock_window(config, energy)
        try:
            clock = PotentialClock.from_potential(grid, ramp, config.clock.mass, energy, config.system.hbar)
        except ValidationError as exc:
            raise ConfigError(f"clock.potential: {exc}") from None
        basis = retain_for_clock(full, clock, eta_for(config))
        psi0 = initial_state(config, basis)
        _tail_warning(psi0, basis, warnings)

        exact = wkb_envelope(wkb_extended_solution(psi0, basis, clock), clock)
        reduced = tau_propagate(psi0, basis, clock)
        comparison = compare_trajectories(reduced, exact)
        profile = wkb_momentum_and_tau(clock)
        row = {
            "energy": energy,
            "fidelity": 1.0 - comparison.worst_fidelity,
            "terminal_error": comparison.terminal_error,
            "tau_end": tau_between(profile, 0, grid.n - 1),
            "speed_ratio": float(profile.speed.min() / profile.speed.max()),
        }
        if config.clock.quartic:
            quartic = PolynomialClock(config.clock.mass, config.clock.quartic, ramp, energy, config.system.hbar)
            row["correction_coefficient"] = wkb_correction_coefficient(quartic, grid.points[grid.n // 2])
        rows.append(row)
    metrics = pd.DataFrame(rows)
    summary = dict(rows[-1])
    checks = [at_least("fidelity", summary["fidelity"], 0.999, scale)]
    if len(rows) > 1:
        checks.append(decreasing("fidelity_error", 1.0 - metrics["fidelity"]))
    curves = {"fidelity_error": (metrics["energy"].to_numpy(), 1.0 - metrics["fidelity"].to_numpy())}
    return ScenarioOutcome(metrics, summary, curves, checks, warnings)


def run_harmonic_clock(config):
    if config.clock.type != "harmonic":
        raise ConfigError("clock.type: the harmonic-clock scenario needs a harmonic clock")
    spec = build_system(config)
    basis = build_basis(config, spec)
    scale = config.run.tolerance_scale
    clock = HarmonicClock(config.clock.mass, config.clock.omega, config.system.hbar)
    energy = float(config.clock.ladder()[0])
    psi0 = initial_state(config, basis)
    warnings = []
    _tail_warning(psi0, basis, warnings)

    pair, h_c = ladder_matrices(clock, config.run.ladder_dim)
    heisenberg_error = float(np.max(np.abs(heisenberg_rate(clock, pair, h_c) + 1j * clock.omega * pair.a)))
    block = pair.commutator()[:-1, :-1]
    commutator_error = float(np.max(np.abs(block - np.eye(pair.dim - 1))))

    amps = project(psi0, basis)

    def psi_of_tau(tau):
        return WaveFunction(basis.grid, evolve_amplitudes(amps, basis, [tau])[0])

    taus = np.linspace(0.0, config.run.t_max, config.run.samples)
    residuals = [log_alpha_residual(psi_of_tau, spec, clock, energy, tau, config.run.step) for tau in taus]
    traj = alpha_trajectory(psi0, basis, clock, alpha_of_tau(clock, taus))
    comparison = compare_trajectories(spectral_propagate(psi0, basis, traj.parameters), traj)

    metrics = pd.DataFrame({
        "tau": traj.parameters,
        "log_alpha_residual": residuals,
        "fidelity_error": comparison.fidelity,
        "l2_error": comparison.l2_error,
    })
    summary = {
        "energy": energy,
        "heisenberg_error": heisenberg_error,
        "commutator_error": commutator_error,
        "max_log_alpha_residual": float(np.max(residuals)),
        "max_fidelity_error": comparison.worst_fidelity,
    }
    checks = [
        at_most("heisenberg_error", heisenberg_error, 1e-12, scale),
        at_most("commutator_error", commutator_error, 1e-12, scale),
        at_most("max_log_alpha_residual", summary["max_log_alpha_residual"], 1e-5, scale),
        at_most("max_fidelity_error", summary["max_fidelity_error"], 1e-10, scale),
    ]
    curves = {"log_alpha_residual": (metrics["tau"].to_numpy(), metrics["log_alpha_residual"].to_numpy())}
    return ScenarioOutcome(metrics, summary, curves, checks, warnings)


def _ensembles(config):
    """(energy, clock, retained basis, states, weights) per ladder energy, same draws each time."""
    spec = build_system(config)
    full = build_basis(config, spec)
    for energy in energy_ladder(config, full):
        clock = FreeClock(config.clock.mass, energy, config.system.hbar)
        basis = retain_for_clock(full, clock, eta_for(config))
        states, weights = random_ensemble(
            basis, clock, clock_window(config, energy), config.run.ensemble_size, rng_for(config)
        )
        yield spec, energy, clock, basis, states, weights


def run_mixed(config):
    scale = config.run.tolerance_scale
    rows = []
    for spec, energy, clock, basis, states, weights in _ensembles(config):
        density = ensemble_density(states, weights)
        family = conditional_family(density)
        h = hamiltonian_matrix(spec)
        residual = von_neumann_residual(family, h, clock)
        traces = family.traces()
        hermiticity = max(float(np.max(np.abs(m.values - m.values.conj().T))) for m in family.members)

        single = ensemble_density(states[:1], [1.0])
        single_residual = von_neumann_residual(conditional_family(single), h, clock)
        mixed_track = single_residual.relative
        pure_track = implied_density_residual(states[0], clock).relative
        reduced_track = reduced_density_residual(states[0], clock)
        reduced_gap = np.linalg.norm(single_residual.matrices - reduced_track.matrices)
        residual_scale = np.linalg.norm(single_residual.matrices)
        rows.append({
            "energy": energy,
            "von_neumann": residual.norm,
            "trace_spread": float(np.max(np.abs(traces - traces[0])) / traces[0]),
            "hermiticity": hermiticity,
            "purity": purity(density),
            "positive": float(is_positive_semidefinite(density.values, density.quadrature)),
            "track_consistency": float(np.max(np.abs(mixed_track - pure_track))),
            # second order in the clock spacing, reported only
            "reduced_track_gap": float(reduced_gap / residual_scale) if residual_scale > 0 else 0.0,
        })
    metrics = pd.DataFrame(rows)
    summary = dict(rows[-1])
    checks = [
        at_most("trace_spread", metrics["trace_spread"].max(), 1e-10, scale),
        at_most("hermiticity", metrics["hermiticity"].max(), 1e-10, scale),
        at_most("track_consistency", metrics["track_consistency"].max(), 1e-10, scale),
    ]
    if len(rows) > 1:
        ratios = _ratios(metrics["von_neumann"])
        summary["von_neumann_ratio"] = float(ratios[-1])
        checks.append(decreasing("von_neumann", metrics["von_neumann"]))
        checks.extend(within(f"von_neumann_ratio_{i + 1}", r, 0.375, 0.625, scale) for i, r in enumerate(ratios))
    curves = {"von_neumann": (metrics["energy"].to_numpy(), metrics["von_neumann"].to_numpy())}
    return ScenarioOutcome(metrics, summary, curves, checks, [])


def run_two_time(config):
    scale = config.run.tolerance_scale
    rows = []
    for spec, energy, clock, basis, states, weights in _ensembles(config):
        density = ensemble_density(states, weights)
        two_time = slow_envelope_residuals(density, clock)
        pure = max(envelope_and_residuals(s, clock).relative_reduced for s in states)
        rows.append({
            "energy": energy,
            "two_time_residual": two_time.relative,
            "pure_reduced": pure,
            "ratio_to_pure": two_time.relative / pure,
            "exact_commutator": exact_commutator_residual(density, clock),
        })
    metrics = pd.DataFrame(rows)
    summary = dict(rows[-1])
    checks = [at_most("ratio_to_pure", metrics["ratio_to_pure"].max(), 5.0, scale)]
    if len(rows) > 1:
        checks.append(decreasing("two_time_residual", metrics["two_time_residual"]))
    curves = {"two_time_residual": (metrics["energy"].to_numpy(), metrics["two_time_residual"].to_numpy())}
    return ScenarioOutcome(metrics, summary, curves, checks, [])


def run_paraxial(config):
    spec = build_system(config)
    scale = config.run.tolerance_scale
    energy = float(config.clock.ladder()[0])
    z_grid = Grid(0.0, config.run.z_max, config.run.samples)
    count = config.modes.count
    if count > spec.grid.n - 2:
        raise ConfigError(f"modes.count: at most {spec.grid.n - 2} transverse modes on this grid")
    init = config.modes.initial
    center = init.center if init.center is not None else 0.5 * (spec.grid.q_min + spec.grid.q_max)
    psi0 = gaussian_packet(spec.grid, center, init.width, init.momentum, config.system.hbar)

    beam = ParaxialSpec(spec, energy, z_grid, modes=count)
    traj = paraxial_propagate(beam, psi0)
    times = traj.metadata["effective_time"]
    basis = spectral_basis(spec, count)
    reference = spectral_propagate(psi0, basis, times).relabeled("z", traj.parameters)
    agreement = compare_trajectories(reference, traj, phase_mode="raw")

    widths = np.array([gaussian_width(traj.sample(i)) for i in range(len(traj))])
    law = gaussian_width_law(init.width, times, config.system.mass, config.system.hbar)
    norms = traj.norms()
    metrics = pd.DataFrame({
        "z": traj.parameters,
        "t": times,
        "width": widths,
        "width_law": law,
        "width_error": np.abs(widths - law) / law,
        "norm": norms,
    })
    summary = {
        "energy": energy,
        "max_width_error": float(metrics["width_error"].max()),
        "norm_drift": float(np.max(np.abs(norms - norms[0]))),
        "agreement": float(np.max(agreement.l2_error)),
    }
    checks = [
        at_most("max_width_error", summary["max_width_error"], 1e-2, scale),
        at_most("norm_drift", summary["norm_drift"], 1e-8, scale),
        at_most("agreement", summary["agreement"], 1e-10, scale),
    ]
    curves = {"width": (metrics["z"].to_numpy(), widths), "width_law": (metrics["z"].to_numpy(), law)}
    return ScenarioOutcome(metrics, summary, curves, checks, [])


SCENARIO_RUNNERS = {
    "convergence": run_convergence,
    "wkb-clock": run_wkb_clock,
    "harmonic-clock": run_harmonic_clock,
    "mixed": run_mixed,
    "paraxial": run_paraxial,
    "two-time": run_two_time,
}


def run_outcome(config):
    logger.info("running %s scenario", config.scenario)
    return SCENARIO_RUNNERS[config.scenario](config)
