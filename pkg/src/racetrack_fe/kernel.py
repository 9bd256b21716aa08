"""Ring distance and the precomputed discounted transport kernel."""

from dataclasses import dataclass
import math

import numpy as np

from .core import TWO_PI, Grid, ModelParams


def _wrap(theta):
    # reduce any angle to the principal range [-pi, pi)
    return (np.asarray(theta, dtype=np.float64) + math.pi) % TWO_PI - math.pi


def ring_distance(theta1, theta2, rho: float):
    """Shortest arc length between two angles on a ring of radius rho."""
    diff = np.abs(_wrap(theta1) - _wrap(theta2))
    dist = rho * np.minimum(diff, TWO_PI - diff)
    return float(dist) if np.ndim(dist) == 0 else dist


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Dense circulant matrix of transport discount factors T(x_i, x_j)^(1-sigma).

    entries[i][j] = exp(-alpha * d(x_i, x_j)) with alpha = tau*(sigma-1); the
    diagonal is 1 and every entry lies in [exp(-alpha*rho*pi), 1].
    """

    entries: np.ndarray
    alpha: float
    t_min: float
    t_max: float
    grid: Grid


def build_kernel(grid: Grid, params: ModelParams) -> KernelMatrix:
    """Precompute the discounted-distance kernel for one grid and parameter set."""
    if not math.isclose(grid.rho, params.rho, rel_tol=1e-12):
        raise ValueError(
            f"grid radius {grid.rho} disagrees with params radius {params.rho}"
        )
    n = grid.n_nodes
    offsets = np.arange(n)
    # shortest offset in whole nodes keeps the row exactly symmetric
    hops = np.minimum(offsets, n - offsets)
    row = np.exp(-params.alpha * grid.rho * grid.dtheta * hops)
    idx = (offsets[None, :] - offsets[:, None]) % n
    entries = row[idx]
    t_max = math.exp(params.tau * grid.rho * math.pi)
    return KernelMatrix(entries, params.alpha, 1.0, t_max, grid)


def kernel_integral_closed_form(alpha: float, rho: float) -> float:
    """Ring integral of exp(-alpha*d(x, y)) dy, independent of x."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    return 2.0 * (-math.expm1(-alpha * rho * math.pi)) / alpha
