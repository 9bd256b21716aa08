import pytest

from racetrack_fe.config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    default_config,
    parse_config,
)
from racetrack_fe.core import ModelParams, NumericsConfig


def _write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


def test_empty_file_gives_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, ""))
    assert cfg == default_config()
    assert cfg.model == ModelParams()
    assert cfg.numerics == NumericsConfig()
    assert cfg.grid_size == 255


def test_full_file_round_trip(tmp_path):
    cfg = parse_config(_write(tmp_path, """
[model]
mu = 0.5
sigma = 4.0
tau = 2.5
rho = 2.0

[numerics]
dt = 0.005
seed = 42
max_steps = 1000

[grid]
n_nodes = 101

[output]
out_dir = results
workers = 2

[stability]
k_window = 7

[sweep]
tau_values = 1.0, 0.5
sigma = 3.5
threshold_ratio = 3.0

[critical-curve]
k_values = 1, 2
sigma_grid = 2.5, 3.5

[heatmap]
tau_min = 0.2
tau_max = 1.2
tau_steps = 5
k = 2

[diagnostics]
b = 0.25
"""))
    assert cfg.model.mu == 0.5
    assert cfg.model.sigma == 4.0
    assert cfg.model.tau == 2.5
    assert cfg.model.rho == 2.0
    assert cfg.numerics.dt == 0.005
    assert cfg.numerics.seed == 42
    assert cfg.numerics.max_steps == 1000
    assert cfg.grid_size == 101
    assert cfg.out_dir == "results"
    assert cfg.workers == 2
    assert cfg.k_window == 7
    assert cfg.tau_values == (1.0, 0.5)
    assert cfg.sweep_sigma == 3.5
    assert cfg.threshold_ratio == 3.0
    assert cfg.curve_k == (1, 2)
    assert cfg.curve_sigma_grid == (2.5, 3.5)
    assert cfg.heat_tau == (0.2, 1.2, 5)
    assert cfg.heat_k == 2
    assert cfg.heat_sigma == (2.0, 4.0, 21)  # untouched keys keep defaults
    assert cfg.diagnostics_b == 0.25


def test_invalid_model_value_names_the_invariant(tmp_path):
    with pytest.raises(ConfigError, match="sigma"):
        parse_config(_write(tmp_path, "[model]\nsigma = 0.5\n"))


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="sigmaa"):
        parse_config(_write(tmp_path, "[model]\nsigmaa = 3.0\n"))


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError, match="plotting"):
        parse_config(_write(tmp_path, "[plotting]\ndpi = 300\n"))


def test_keys_are_case_sensitive(tmp_path):
    with pytest.raises(ConfigError, match="Sigma"):
        parse_config(_write(tmp_path, "[model]\nSigma = 3.0\n"))


def test_type_errors_are_reported_with_location(tmp_path):
    with pytest.raises(ConfigError, match=r"\[numerics\] dt"):
        parse_config(_write(tmp_path, "[numerics]\ndt = fast\n"))


def test_missing_file_is_a_config_error():
    with pytest.raises(ConfigError, match="read"):
        parse_config("/nonexistent/run.cfg")


def test_duplicate_key_rejected(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "[model]\ntau = 1.0\ntau = 2.0\n"))


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(ModelParams(), NumericsConfig(), grid_size=2)
    with pytest.raises(ConfigError):
        RunConfig(ModelParams(), NumericsConfig(), workers=0)
    with pytest.raises(ConfigError):
        RunConfig(ModelParams(), NumericsConfig(), threshold_ratio=1.0)
    with pytest.raises(ConfigError):
        RunConfig(ModelParams(), NumericsConfig(), heat_k=0)


def test_overrides_layer_on_top():
    cfg = default_config()
    new = apply_overrides(cfg, tau=0.3, sigma=2.5, grid=127, dt=0.002,
                          seed=9, out="there", workers=3)
    assert new.model.tau == 0.3
    assert new.model.sigma == 2.5
    assert new.grid_size == 127
    assert new.numerics.dt == 0.002
    assert new.numerics.seed == 9
    assert new.out_dir == "there"
    assert new.workers == 3
    # untouched fields survive
    assert new.model.mu == cfg.model.mu
    assert new.numerics.stat_tol == cfg.numerics.stat_tol


def test_override_validation_becomes_config_error():
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), sigma=0.5)
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), dt=-1.0)
