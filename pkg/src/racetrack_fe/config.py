"""Run configuration: defaults, file parsing, strict validation.

Config files are INI-style sections of key = value pairs. Unknown sections or
keys are rejected outright; a typo in a sweep config must fail loudly, not
silently run the default experiment.
"""

import configparser
from dataclasses import dataclass, replace

from .core import ModelParams, NumericsConfig


class ConfigError(ValueError):
    """A configuration file or value cannot be accepted."""


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    numerics: NumericsConfig
    grid_size: int = 255
    out_dir: str | None = None
    workers: int = 1
    k_window: int = 20
    threshold_ratio: float = 2.0
    tau_values: tuple = (1.6, 1.3, 1.1, 0.9, 0.5, 0.2)
    sweep_sigma: float = 3.0
    sigma_values: tuple = (2.7, 2.5, 2.4, 2.2, 2.0, 1.7)
    sweep_tau: float = 2.0
    curve_k: tuple = (1, 2, 3, 4, 5)
    curve_sigma_grid: tuple = (2.2, 2.6, 3.0, 3.4)
    heat_tau: tuple = (0.1, 3.0, 30)  # (min, max, count)
    heat_sigma: tuple = (2.0, 4.0, 21)
    heat_k: int = 1
    diagnostics_b: float | None = None  # default LambdaTotal/2 at use site

    def __post_init__(self):
        if self.grid_size < 3:
            raise ConfigError(f"grid n_nodes must be at least 3, got {self.grid_size}")
        if self.heat_k == 0:
            raise ConfigError("heatmap mode k must be nonzero")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.k_window < 1:
            raise ConfigError(f"k_window must be at least 1, got {self.k_window}")
        if not self.threshold_ratio > 1.0:
            raise ConfigError(
                f"threshold_ratio must exceed 1, got {self.threshold_ratio}"
            )


def default_config() -> RunConfig:
    return RunConfig(model=ModelParams(), numerics=NumericsConfig())


_FLOAT = "float"
_INT = "int"
_STR = "str"
_FLOATS = "float list"
_INTS = "int list"

_SCHEMA = {
    "model": {
        "mu": _FLOAT, "sigma": _FLOAT, "bigF": _FLOAT, "tau": _FLOAT,
        "v": _FLOAT, "LambdaTotal": _FLOAT, "PhiTotal": _FLOAT, "rho": _FLOAT,
    },
    "numerics": {
        "dt": _FLOAT, "fp_tol": _FLOAT, "fp_max_iter": _INT, "stat_tol": _FLOAT,
        "max_steps": _INT, "seed": _INT, "perturb_amplitude": _FLOAT,
    },
    "grid": {"n_nodes": _INT},
    "output": {"out_dir": _STR, "workers": _INT},
    "stability": {"k_window": _INT},
    "sweep": {
        "tau_values": _FLOATS, "sigma": _FLOAT,
        "sigma_values": _FLOATS, "tau": _FLOAT,
        "threshold_ratio": _FLOAT,
    },
    "critical-curve": {"k_values": _INTS, "sigma_grid": _FLOATS},
    "heatmap": {
        "tau_min": _FLOAT, "tau_max": _FLOAT, "tau_steps": _INT,
        "sigma_min": _FLOAT, "sigma_max": _FLOAT, "sigma_steps": _INT,
        "k": _INT,
    },
    "diagnostics": {"b": _FLOAT},
}


def _convert(section: str, key: str, raw: str, kind: str):
    try:
        if kind == _FLOAT:
            return float(raw)
        if kind == _INT:
            return int(raw)
        if kind == _FLOATS:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        if kind == _INTS:
            return tuple(int(p) for p in raw.split(",") if p.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: expected {kind}, got {raw!r}") from exc


def parse_config(path: str) -> RunConfig:
    """Parse and validate a config file; an empty file yields all defaults."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str  # keys are case-sensitive field names
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    values: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"unknown config section [{section}]; "
                f"expected one of {sorted(_SCHEMA)}"
            )
        for key, raw in parser.items(section):
            kind = _SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}]; "
                    f"expected one of {sorted(_SCHEMA[section])}"
                )
            values[(section, key)] = _convert(section, key, raw, kind)

    def section_kwargs(section: str) -> dict:
        return {k: v for (s, k), v in values.items() if s == section}

    try:
        model = ModelParams(**section_kwargs("model"))
        numerics = NumericsConfig(**section_kwargs("numerics"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    kwargs: dict = {}
    grid = section_kwargs("grid")
    if "n_nodes" in grid:
        kwargs["grid_size"] = grid["n_nodes"]
    output = section_kwargs("output")
    if "out_dir" in output:
        kwargs["out_dir"] = output["out_dir"]
    if "workers" in output:
        kwargs["workers"] = output["workers"]
    stab = section_kwargs("stability")
    if "k_window" in stab:
        kwargs["k_window"] = stab["k_window"]
    sweep = section_kwargs("sweep")
    if "tau_values" in sweep:
        kwargs["tau_values"] = sweep["tau_values"]
    if "sigma" in sweep:
        kwargs["sweep_sigma"] = sweep["sigma"]
    if "sigma_values" in sweep:
        kwargs["sigma_values"] = sweep["sigma_values"]
    if "tau" in sweep:
        kwargs["sweep_tau"] = sweep["tau"]
    if "threshold_ratio" in sweep:
        kwargs["threshold_ratio"] = sweep["threshold_ratio"]
    curve = section_kwargs("critical-curve")
    if "k_values" in curve:
        kwargs["curve_k"] = curve["k_values"]
    if "sigma_grid" in curve:
        kwargs["curve_sigma_grid"] = curve["sigma_grid"]
    heat = section_kwargs("heatmap")
    if heat:
        default = RunConfig(model, numerics)
        t = (
            heat.get("tau_min", default.heat_tau[0]),
            heat.get("tau_max", default.heat_tau[1]),
            heat.get("tau_steps", default.heat_tau[2]),
        )
        s = (
            heat.get("sigma_min", default.heat_sigma[0]),
            heat.get("sigma_max", default.heat_sigma[1]),
            heat.get("sigma_steps", default.heat_sigma[2]),
        )
        kwargs["heat_tau"] = t
        kwargs["heat_sigma"] = s
        if "k" in heat:
            kwargs["heat_k"] = heat["k"]
    diag = section_kwargs("diagnostics")
    if "b" in diag:
        kwargs["diagnostics_b"] = diag["b"]

    return RunConfig(model=model, numerics=numerics, **kwargs)


def apply_overrides(
    cfg: RunConfig,
    tau: float | None = None,
    sigma: float | None = None,
    grid: int | None = None,
    dt: float | None = None,
    seed: int | None = None,
    out: str | None = None,
    workers: int | None = None,
) -> RunConfig:
    """Layer command-line overrides on top of a parsed config."""
    model = cfg.model
    numerics = cfg.numerics
    try:
        if tau is not None:
            model = replace(model, tau=tau)
        if sigma is not None:
            model = replace(model, sigma=sigma)
        if dt is not None:
            numerics = replace(numerics, dt=dt)
        if seed is not None:
            numerics = replace(numerics, seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kwargs: dict = {}
    if grid is not None:
        kwargs["grid_size"] = grid
    if out is not None:
        kwargs["out_dir"] = out
    if workers is not None:
        kwargs["workers"] = workers
    return replace(cfg, model=model, numerics=numerics, **kwargs)
