"""Agglomeration dynamics of footloose workers on a ring economy.

Workers relocate along a circular space toward higher real wages; trade
between locations pays iceberg transport costs. The package solves the
instantaneous wage/price equilibrium for a frozen worker density, evolves the
density by replicator dynamics to stationary spike patterns, analyzes linear
stability of the uniform state mode by mode, and reproduces the spike-count
parameter sweeps. Heavy loops run through a compiled backend when numba is
importable and through plain numpy otherwise (see RACETRACK_FE_BACKEND).
"""

from ._backends import BACKEND_ENV, available_backends, select_backend
from ._version import __version__
from .analysis import (
    SweepRow,
    count_spikes,
    measured_growth_rate,
    run_sigma_sweep,
    run_tau_sweep,
)
from .config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    default_config,
    parse_config,
)
from .core import (
    TWO_PI,
    Field,
    Grid,
    ModelParams,
    NumericsConfig,
    make_grid,
    perturbed_uniform,
    uniform_field,
)
from .dynamics import (
    SimulationResult,
    average_real_wage,
    euler_step,
    integrate_fixed,
    replicator_rhs,
    rk4_step,
    simulate,
)
from .equilibrium import (
    EquilibriumState,
    WageSolution,
    income,
    instantaneous_equilibrium,
    price_index,
    real_wage,
    solve_wage,
)
from .errors import (
    BracketError,
    NegativeDensityError,
    NumericalError,
    WageConvergenceError,
)
from .io import (
    field_from_csv,
    read_field_csv,
    render_heatmap_svg,
    render_line_svg,
    write_field_csv,
    write_modes_csv,
    write_sweep_csv,
)
from .kernel import (
    KernelMatrix,
    build_kernel,
    kernel_integral_closed_form,
    ring_distance,
)
from .stability import (
    HomogeneousState,
    ModeDiagnostics,
    StabilityReport,
    critical_curve,
    critical_tau,
    eigenvalue,
    homogeneous_state,
    mode_E,
    mode_Z,
    no_black_hole,
    realwage_response_ratio,
    stability_report,
    wage_response_ratio,
    z_star,
)
from .theory import (
    TheoryBounds,
    apriori_bounds,
    contraction_modulus,
    modulus_from_ratios,
)

__all__ = [
    "BACKEND_ENV",
    "BracketError",
    "ConfigError",
    "EquilibriumState",
    "Field",
    "Grid",
    "HomogeneousState",
    "KernelMatrix",
    "ModeDiagnostics",
    "ModelParams",
    "NegativeDensityError",
    "NumericalError",
    "NumericsConfig",
    "RunConfig",
    "SimulationResult",
    "StabilityReport",
    "SweepRow",
    "TWO_PI",
    "TheoryBounds",
    "WageConvergenceError",
    "WageSolution",
    "__version__",
    "apply_overrides",
    "apriori_bounds",
    "available_backends",
    "average_real_wage",
    "build_kernel",
    "contraction_modulus",
    "count_spikes",
    "critical_curve",
    "critical_tau",
    "default_config",
    "eigenvalue",
    "euler_step",
    "field_from_csv",
    "homogeneous_state",
    "income",
    "instantaneous_equilibrium",
    "integrate_fixed",
    "kernel_integral_closed_form",
    "make_grid",
    "measured_growth_rate",
    "mode_E",
    "mode_Z",
    "modulus_from_ratios",
    "no_black_hole",
    "parse_config",
    "perturbed_uniform",
    "price_index",
    "read_field_csv",
    "real_wage",
    "realwage_response_ratio",
    "render_heatmap_svg",
    "render_line_svg",
    "replicator_rhs",
    "ring_distance",
    "rk4_step",
    "run_sigma_sweep",
    "run_tau_sweep",
    "select_backend",
    "simulate",
    "solve_wage",
    "stability_report",
    "uniform_field",
    "wage_response_ratio",
    "write_field_csv",
    "write_modes_csv",
    "write_sweep_csv",
    "z_star",
]
