"""Model parameters, the periodic grid, discrete fields, and numerics knobs."""

from dataclasses import dataclass
import math

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """Economic and geometric constants of the ring economy.

    mu: expenditure share on manufactured goods, 0 < mu < 1.
    sigma: elasticity of substitution between varieties, sigma > 1.
    bigF: fixed labor input per firm.
    tau: transport cost rate per unit distance.
    v: migration speed.
    LambdaTotal: total mobile population.
    PhiTotal: total immobile population.
    rho: ring radius.
    """

    mu: float = 0.6
    sigma: float = 3.0
    bigF: float = 1.0
    tau: float = 1.0
    v: float = 1.0
    LambdaTotal: float = 1.0
    PhiTotal: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ValueError(f"mu must lie in (0, 1), got {self.mu}")
        if not self.sigma > 1.0:
            raise ValueError(f"sigma must exceed 1, got {self.sigma}")
        if not self.bigF > 0.0:
            raise ValueError(f"bigF must be positive, got {self.bigF}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.v > 0.0:
            raise ValueError(f"v must be positive, got {self.v}")
        if not self.LambdaTotal > 0.0:
            raise ValueError(f"LambdaTotal must be positive, got {self.LambdaTotal}")
        if not self.PhiTotal > 0.0:
            raise ValueError(f"PhiTotal must be positive, got {self.PhiTotal}")
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")

    @property
    def alpha(self) -> float:
        """Composite decay rate tau*(sigma-1) of the transport kernel."""
        return self.tau * (self.sigma - 1.0)


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic discretization of the angle interval [-pi, pi)."""

    n_nodes: int
    theta: np.ndarray
    dtheta: float
    rho: float
    weight: float  # quadrature weight rho*dtheta per node


@dataclass(eq=False)
class Field:
    """Real-valued function sampled on the nodes of a Grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"field has {self.values.shape} values for a grid of "
                f"{self.grid.n_nodes} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must all be finite")

    def integral(self) -> float:
        """Quadrature integral over the ring."""
        return float(self.values.sum() * self.grid.weight)

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid)


@dataclass(frozen=True)
class NumericsConfig:
    """Knobs for the equilibrium solver and the time integrator."""

    dt: float = 0.01
    fp_tol: float = 1e-12
    fp_max_iter: int = 500
    stat_tol: float = 1e-10
    max_steps: int = 5_000_000
    seed: int = 1
    perturb_amplitude: float = 0.01

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.fp_tol > 0.0:
            raise ValueError(f"fp_tol must be positive, got {self.fp_tol}")
        if self.fp_max_iter < 1:
            raise ValueError(f"fp_max_iter must be at least 1, got {self.fp_max_iter}")
        if not self.stat_tol > 0.0:
            raise ValueError(f"stat_tol must be positive, got {self.stat_tol}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be at least 1, got {self.max_steps}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if not 0.0 <= self.perturb_amplitude < 1.0:
            raise ValueError(
                f"perturb_amplitude must lie in [0, 1), got {self.perturb_amplitude}"
            )


def make_grid(n_nodes: int, rho: float) -> Grid:
    """Uniform periodic grid of n_nodes angles starting at -pi."""
    if n_nodes < 3:
        raise ValueError(f"grid needs at least 3 nodes, got {n_nodes}")
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    dtheta = TWO_PI / n_nodes
    theta = -math.pi + dtheta * np.arange(n_nodes)
    return Grid(n_nodes, theta, dtheta, float(rho), float(rho) * dtheta)


def uniform_field(grid: Grid, total: float) -> Field:
    """Constant field whose quadrature integral equals total."""
    if not total > 0.0:
        raise ValueError(f"total mass must be positive, got {total}")
    value = total / (TWO_PI * grid.rho)
    return Field(np.full(grid.n_nodes, value), grid)


def perturbed_uniform(grid: Grid, total: float, cfg: NumericsConfig) -> Field:
    """Uniform field with seeded multiplicative noise, zero-mean and mass-exact.

    The noise is uniform in [-delta, delta) per node, shifted to exact zero
    mean and rescaled so the quadrature integral equals total; the result is
    bit-reproducible for a fixed seed.
    """
    delta = cfg.perturb_amplitude
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"perturbation amplitude must lie in [0, 1), got {delta}")
    base = uniform_field(grid, total)
    if delta == 0.0:
        return base
    rng = np.random.default_rng(cfg.seed)
    eps = rng.uniform(-delta, delta, grid.n_nodes)
    eps -= eps.mean()
    values = base.values * (1.0 + eps)
    values *= total / (values.sum() * grid.weight)
    if values.min() <= 0.0:
        raise ValueError(
            "perturbation produced a nonpositive density; reduce perturb_amplitude"
        )
    return Field(values, grid)
