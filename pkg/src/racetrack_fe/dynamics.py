"""Replicator migration dynamics integrated to a stationary pattern.

The mobile density follows d(lambda)/dt = v*(omega - omega_avg)*lambda where
omega is the instantaneous-equilibrium real wage and omega_avg its
population-weighted spatial mean. The weighted sum of the right-hand side
vanishes identically when the quadrature mass equals LambdaTotal, so the
explicit Euler update conserves mass up to rounding; drift is monitored and
never repaired.
"""

from dataclasses import dataclass

import numpy as np

from . import _backends
from ._backends import STATUS_NEGATIVE, STATUS_STATIONARY, STATUS_WAGE_FAIL
from .core import Field, ModelParams, NumericsConfig
from .equilibrium import EquilibriumState, _uniform_wage, instantaneous_equilibrium
from .errors import NegativeDensityError, WageConvergenceError
from .kernel import KernelMatrix


@dataclass(eq=False)
class SimulationResult:
    final_lambda: Field
    final_equilibrium: EquilibriumState
    steps_taken: int
    converged: bool
    trajectory_samples: list | None
    mass_drift: float  # max over steps of |quadrature(lambda) - LambdaTotal|


def average_real_wage(lam: Field, omega: Field, LambdaTotal: float) -> float:
    """Population-weighted spatial mean of the real wage."""
    if not LambdaTotal > 0.0:
        raise ValueError(f"LambdaTotal must be positive, got {LambdaTotal}")
    return float(np.dot(omega.values, lam.values)) * lam.grid.weight / LambdaTotal


def replicator_rhs(lam: Field, omega: Field, params: ModelParams) -> Field:
    """Migration velocity v*(omega - omega_avg)*lambda at every node."""
    omega_avg = average_real_wage(lam, omega, params.LambdaTotal)
    return Field(params.v * (omega.values - omega_avg) * lam.values, lam.grid)


def _rhs_values(lam_values, phi, kernel, params, cfg, w0):
    """Replicator right-hand side for raw values; returns (rhs, wage field)."""
    lam = Field(lam_values, phi.grid)
    if lam.values.min() < 0.0:
        raise NegativeDensityError()
    eq = instantaneous_equilibrium(lam, phi, kernel, params, cfg, w0=w0)
    rhs = replicator_rhs(lam, eq.omega, params)
    return rhs.values, eq.w


def euler_step(
    lam: Field,
    phi: Field,
    kernel: KernelMatrix,
    params: ModelParams,
    cfg: NumericsConfig,
    dt: float | None = None,
    w0: Field | None = None,
) -> Field:
    """One explicit Euler step of the replicator dynamics.

    dt=None takes the configured step; an explicit dt may be 0, which returns
    the state unchanged (convenient for horizon arithmetic in callers).
    """
    if dt is None:
        dt = cfg.dt
    rhs, _ = _rhs_values(lam.values, phi, kernel, params, cfg, w0)
    new = lam.values + dt * rhs
    if new.min() < 0.0:
        raise NegativeDensityError()
    return Field(new, lam.grid)


def rk4_step(
    lam: Field,
    phi: Field,
    kernel: KernelMatrix,
    params: ModelParams,
    cfg: NumericsConfig,
    dt: float | None = None,
    w0: Field | None = None,
) -> Field:
    """Classical four-stage step of the same dynamics, used as a cross-check.

    Every stage re-solves the instantaneous equilibrium, warm-starting each
    wage solve from the previous stage. Like euler_step, an explicit dt=0 is
    allowed and returns the state unchanged.
    """
    if dt is None:
        dt = cfg.dt
    k1, w1 = _rhs_values(lam.values, phi, kernel, params, cfg, w0)
    k2, w2 = _rhs_values(lam.values + 0.5 * dt * k1, phi, kernel, params, cfg, w1)
    k3, w3 = _rhs_values(lam.values + 0.5 * dt * k2, phi, kernel, params, cfg, w2)
    k4, _ = _rhs_values(lam.values + dt * k3, phi, kernel, params, cfg, w3)
    new = lam.values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if new.min() < 0.0:
        raise NegativeDensityError()
    return Field(new, lam.grid)


def _validated_start(lambda0: Field, phi: Field, params: ModelParams):
    if lambda0.values.min() < 0.0:
        raise ValueError("initial density must be nonnegative everywhere")
    mass = lambda0.integral()
    if abs(mass - params.LambdaTotal) > 1e-8 * params.LambdaTotal:
        raise ValueError(
            f"initial quadrature mass {mass!r} does not match "
            f"LambdaTotal {params.LambdaTotal!r}"
        )
    if phi.values.min() < 0.0:
        raise ValueError("immobile density must be nonnegative everywhere")
    lam = np.array(lambda0.values, dtype=np.float64, copy=True, order="C")
    w = np.full(
        lambda0.grid.n_nodes,
        _uniform_wage(mass, phi.integral(), params),
        dtype=np.float64,
    )
    return lam, w


def simulate(
    lambda0: Field,
    phi: Field,
    kernel: KernelMatrix,
    params: ModelParams,
    cfg: NumericsConfig,
    snapshot_stride: int | None = None,
    backend: str | None = None,
) -> SimulationResult:
    """Integrate until the per-node change drops below stat_tol or steps run out."""
    lam, w = _validated_start(lambda0, phi, params)
    grid = lambda0.grid
    be = _backends.select_backend(backend)
    samples = None
    if snapshot_stride is not None:
        if snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be at least 1, got {snapshot_stride}")
        samples = [(0.0, Field(lam.copy(), grid))]
    steps = 0
    converged = False
    max_drift = 0.0
    while steps < cfg.max_steps:
        chunk = min(cfg.max_steps - steps, snapshot_stride or 65536)
        done, status, drift, _change, _fp, fp_resid = be.advance(
            lam, w, phi.values, kernel.entries, grid.weight, params.bigF,
            params.mu, params.sigma, params.v, params.LambdaTotal, cfg.dt,
            chunk, cfg.fp_tol, cfg.fp_max_iter, cfg.stat_tol,
        )
        steps += done
        max_drift = max(max_drift, drift)
        if status == STATUS_WAGE_FAIL:
            raise WageConvergenceError(cfg.fp_max_iter, fp_resid, step=steps + 1)
        if status == STATUS_NEGATIVE:
            raise NegativeDensityError(steps + 1)
        if samples is not None and done == chunk:
            samples.append((steps * cfg.dt, Field(lam.copy(), grid)))
        if status == STATUS_STATIONARY:
            converged = True
            break
    final_lambda = Field(lam, grid)
    if samples is not None and samples[-1][0] != steps * cfg.dt:
        samples.append((steps * cfg.dt, final_lambda.copy()))
    final_eq = instantaneous_equilibrium(
        final_lambda, phi, kernel, params, cfg, w0=Field(w, grid)
    )
    return SimulationResult(final_lambda, final_eq, steps, converged, samples, max_drift)


def integrate_fixed(
    lambda0: Field,
    phi: Field,
    kernel: KernelMatrix,
    params: ModelParams,
    cfg: NumericsConfig,
    n_steps: int,
    record_stride: int | None = None,
    backend: str | None = None,
):
    """Run exactly n_steps Euler steps with the stationarity check disabled.

    Returns (final Field, samples, max_mass_drift); samples is a list of
    (time, values array) pairs including t=0 when record_stride is set.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be nonnegative, got {n_steps}")
    lam, w = _validated_start(lambda0, phi, params)
    grid = lambda0.grid
    be = _backends.select_backend(backend)
    samples = None
    if record_stride is not None:
        if record_stride < 1:
            raise ValueError(f"record_stride must be at least 1, got {record_stride}")
        samples = [(0.0, lam.copy())]
    steps = 0
    max_drift = 0.0
    while steps < n_steps:
        chunk = min(n_steps - steps, record_stride or 65536)
        done, status, drift, _change, _fp, fp_resid = be.advance(
            lam, w, phi.values, kernel.entries, grid.weight, params.bigF,
            params.mu, params.sigma, params.v, params.LambdaTotal, cfg.dt,
            chunk, cfg.fp_tol, cfg.fp_max_iter, 0.0,  # stat_tol 0 disables the stop rule
        )
        steps += done
        max_drift = max(max_drift, drift)
        if status == STATUS_WAGE_FAIL:
            raise WageConvergenceError(cfg.fp_max_iter, fp_resid, step=steps + 1)
        if status == STATUS_NEGATIVE:
            raise NegativeDensityError(steps + 1)
        if samples is not None:
            samples.append((steps * cfg.dt, lam.copy()))
    return Field(lam, grid), samples, max_drift
