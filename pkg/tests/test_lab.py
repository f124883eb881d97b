import copy
import json
import pickle

import pytest

from lab.acceptance import CRITERIA, run_acceptance
from lab.config import ConfigError, NumericalFailure, Settings
from lab.results import output_directory, plot_table, run_scenario
from lab.scenarios import at_least, at_most, decreasing, run_outcome, within
from lab.schema import ResultRecord, load_scenario, parse_scenario
from lab.sweep import parse_values, sweep, with_value, write_sweep
from main import main
from numerics.errors import StepSizeError

SMALL_CONVERGENCE = {
    "scenario": "convergence",
    "system": {"potential": {"name": "box"}, "grid": {"q_min": 0.0, "q_max": 1.0, "n": 41}},
    "clock": {"type": "free", "energies": [50, 100, 200], "energy_unit": "top_mode"},
    "modes": {"count": 3, "initial": {"kind": "gaussian", "center": 0.5, "width": 0.1}},
    "run": {"t_max": 0.1, "clock_points": 51, "seed": 5},
}


@pytest.fixture
def small_config():
    return parse_scenario(copy.deepcopy(SMALL_CONVERGENCE))


@pytest.fixture
def settings(tmp_path):
    return Settings({"CLOCKLAB_WORKERS": "1", "CLOCKLAB_OUTPUT": str(tmp_path / "results")})


# ============================================================================
# Scenario documents
# ============================================================================

def test_shipped_scenarios_parse():
    paths = sorted(Settings().scenarios_dir.glob("*.json"))
    assert len(paths) == 7
    scenarios = {load_scenario(p).scenario for p in paths}
    assert scenarios == {"convergence", "wkb-clock", "harmonic-clock", "mixed", "paraxial", "two-time"}


def test_parse_error_names_the_field():
    data = copy.deepcopy(SMALL_CONVERGENCE)
    data["system"]["grid"]["n"] = 2
    with pytest.raises(ConfigError, match=r"system\.grid\.n"):
        parse_scenario(data, "bad.json")


@pytest.mark.parametrize("clock", [
    {"type": "free"},
    {"type": "free", "energy": 1.0, "energies": [2.0]},
    {"type": "free", "energies": [2.0, 1.0]},
    {"type": "free", "energy": -1.0},
    {"type": "potential", "energy": 1.0},
])
def test_clock_block_rules(clock):
    data = copy.deepcopy(SMALL_CONVERGENCE)
    data["clock"] = clock
    with pytest.raises(ConfigError, match="clock"):
        parse_scenario(data)


def test_unknown_keys_are_rejected():
    data = copy.deepcopy(SMALL_CONVERGENCE)
    data["run"]["t_maxx"] = 1.0
    with pytest.raises(ConfigError, match="t_maxx"):
        parse_scenario(data)


def test_load_scenario_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_scenario(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{\n  \"scenario\": \n")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_scenario(broken)


def test_result_record_rejects_non_finite_metrics():
    with pytest.raises(ValueError):
        ResultRecord(scenario="convergence", config={}, summary={"x": float("nan")}, metrics=[],
                     environment={}, wall_clock=0.0)


# ============================================================================
# Settings and checks
# ============================================================================

def test_settings_from_environment(tmp_path):
    settings = Settings({"CLOCKLAB_WORKERS": "3", "CLOCKLAB_OUTPUT": str(tmp_path)})
    assert settings.workers == 3
    assert settings.output_dir == tmp_path
    assert Settings({}).workers >= 1
    with pytest.raises(ConfigError):
        Settings({"CLOCKLAB_WORKERS": "many"})
    with pytest.raises(ConfigError):
        Settings({"CLOCKLAB_WORKERS": "0"})


def test_check_scaling():
    assert at_most("x", 0.5, 1.0).passed
    assert not at_most("x", 0.5, 1.0, scale=0.0).passed
    assert at_least("f", 0.9995, 0.999).passed
    assert not at_least("f", 0.9995, 0.999, scale=0.1).passed
    assert within("r", 0.5, 0.4, 0.6).passed
    assert not within("r", 0.55, 0.4, 0.6, scale=0.0).passed
    assert decreasing("e", [3.0, 2.0, 1.0]).passed
    assert not decreasing("e", [3.0, 3.0]).passed


def test_output_directory_precedence(small_config, settings, tmp_path):
    assert output_directory(small_config, tmp_path / "x", settings) == tmp_path / "x"
    assert output_directory(small_config, None, settings) == settings.output_dir / "convergence"


def test_plot_table_is_long_format():
    table = plot_table({"a": ([1, 2], [3, 4]), "b": ([5], [6])})
    assert list(table.columns) == ["curve", "x", "y"]
    assert table["curve"].tolist() == ["a", "a", "b"]


# ============================================================================
# Running scenarios
# ============================================================================

def test_run_scenario_writes_outputs(small_config, tmp_path):
    record, outcome = run_scenario(small_config, out=tmp_path / "run")
    for name in ("result.json", "metrics.csv", "plotdata.csv"):
        assert (tmp_path / "run" / name).exists()
    saved = json.loads((tmp_path / "run" / "result.json").read_text())
    assert saved["scenario"] == "convergence"
    assert saved["environment"]["seed"] == 5
    errors = outcome.metrics["terminal_error"].tolist()
    assert errors == sorted(errors, reverse=True)
    assert record.summary["energy"] == pytest.approx(max(outcome.metrics["energy"]))


def test_tail_warning_follows_span(small_config):
    assert any("out-of-span tail" in w for w in run_outcome(small_config).warnings)
    data = copy.deepcopy(SMALL_CONVERGENCE)
    data["modes"]["initial"] = {"kind": "mode", "mode": 1}
    assert not any("out-of-span tail" in w for w in run_outcome(parse_scenario(data)).warnings)


def test_runs_are_reproducible(small_config, tmp_path):
    run_scenario(small_config, out=tmp_path / "a")
    run_scenario(small_config, out=tmp_path / "b")
    for name in ("metrics.csv", "plotdata.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_failed_check_still_writes(tmp_path):
    config = parse_scenario({
        "scenario": "paraxial",
        "system": {"grid": {"q_min": -5.0, "q_max": 5.0, "n": 41}},
        "clock": {"energy": 50.0},
        "modes": {"count": 39, "initial": {"center": 0.0, "width": 0.5}},
        "run": {"z_max": 1.0, "samples": 3, "tolerance_scale": 0.0},
    })
    with pytest.raises(NumericalFailure) as info:
        run_scenario(config, out=tmp_path / "failed")
    assert info.value.metric == "max_width_error"
    assert (tmp_path / "failed" / "result.json").exists()
    saved = json.loads((tmp_path / "failed" / "result.json").read_text())
    assert not saved["checks"][0]["passed"]


def test_main_run_bad_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    data = copy.deepcopy(SMALL_CONVERGENCE)
    data["scenario"] = "teleport"
    bad.write_text(json.dumps(data))
    out = tmp_path / "out"
    assert main(["run", str(bad), "--out", str(out)]) == 2
    assert not out.exists()


def test_main_run_and_list(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(SMALL_CONVERGENCE))
    assert main(["run", str(good), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "result.json").exists()
    assert main(["list"]) == 0
    assert main([]) == 0


# ============================================================================
# Sweeps
# ============================================================================

def test_parse_values():
    assert parse_values("1, 2.5,4") == [1.0, 2.5, 4.0]
    with pytest.raises(ConfigError):
        parse_values("1,two")


def test_with_value_coerces_and_validates(small_config):
    assert with_value(small_config, "modes.count", 2.0).modes.count == 2
    assert with_value(small_config, "run.t_max", 0.2).run.t_max == 0.2
    with pytest.raises(ConfigError, match="no field"):
        with_value(small_config, "run.nope", 1.0)
    with pytest.raises(ConfigError, match="not a scalar"):
        with_value(small_config, "system.grid", 1.0)
    with pytest.raises(ConfigError, match="does not resolve"):
        with_value(small_config, "nowhere.n", 1.0)
    with pytest.raises(ConfigError):
        with_value(small_config, "system.grid.n", 2.0)


def test_sweep_single_value(small_config, settings, tmp_path):
    table = sweep(small_config, "run.t_max", [0.05], workers=1, settings=settings)
    assert len(table) == 1
    assert table.columns[0] == "run.t_max"
    assert "terminal_error" in table.columns
    path = write_sweep(table, small_config, tmp_path / "sweep")
    assert path.name == "sweep.csv"


def test_sweep_adds_ratio_columns(small_config, settings):
    table = sweep(small_config, "run.t_max", [0.05, 0.1], workers=1, settings=settings)
    assert list(table["run.t_max"]) == [0.05, 0.1]
    assert "terminal_error_ratio" in table.columns


def test_parallel_sweep_reraises_worker_errors(settings, tmp_path):
    config = load_scenario(Settings().scenarios_dir / "wkb_clock.json")
    with pytest.raises(StepSizeError) as info:
        sweep(config, "run.clock_points", [11, 21], workers=2, settings=settings)
    assert info.value.index == 0
    path = str(Settings().scenarios_dir / "wkb_clock.json")
    argv = ["sweep", path, "--axis", "run.clock_points", "--values", "11,21", "--workers", "2", "--out", str(tmp_path)]
    assert main(argv) == 1


# ============================================================================
# Acceptance suite
# ============================================================================

def test_criteria_are_numbered_one_to_ten():
    assert [n for n, _, _ in CRITERIA] == list(range(1, 11))


def test_cheap_criteria_pass():
    results = run_acceptance(only=[2, 3])
    assert [r.number for r in results] == [2, 3]
    assert all(r.passed for r in results), [(r.number, r.error, r.failed_checks) for r in results]


def test_zero_tolerance_fails():
    (result,) = run_acceptance(only=[10], scale=0.0)
    assert not result.passed
    assert "eigen_residual" in result.failed_checks


def test_unknown_criterion():
    with pytest.raises(ConfigError):
        run_acceptance(only=[11])


def test_main_check_exit_codes():
    assert main(["check", "--only", "10", "--tolerance-scale", "0"]) == 1
    assert main(["check", "--only", "2"]) == 0
    assert main(["check", "--only", "12"]) == 2


def test_numerical_failure_names_metric():
    exc = NumericalFailure("terminal_error", "0.1 not <= 0.01")
    assert exc.metric == "terminal_error"
    assert str(exc).startswith("terminal_error:")
    restored = pickle.loads(pickle.dumps(exc))
    assert restored.metric == "terminal_error"
    assert str(restored) == str(exc)
