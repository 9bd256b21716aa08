import numpy as np
import pytest

from racetrack_fe import _backends
from racetrack_fe._backends import (
    BACKEND_ENV,
    STATUS_NEGATIVE,
    STATUS_RAN,
    STATUS_STATIONARY,
    STATUS_WAGE_FAIL,
    available_backends,
    select_backend,
)
from racetrack_fe.core import ModelParams, NumericsConfig, make_grid, perturbed_uniform, uniform_field
from racetrack_fe.dynamics import simulate
from racetrack_fe.kernel import build_kernel

PARAMS = ModelParams(tau=0.5)


def _state(n=64, seed=3):
    grid = make_grid(n, PARAMS.rho)
    kern = build_kernel(grid, PARAMS)
    lam0 = perturbed_uniform(grid, PARAMS.LambdaTotal, NumericsConfig(seed=seed))
    phi = uniform_field(grid, PARAMS.PhiTotal)
    return grid, kern, lam0, phi


def _advance_args(grid, kern, lam, phi, dt=0.01, n_steps=100,
                  fp_tol=1e-12, fp_max_iter=500, stat_tol=1e-10):
    return (lam, np.full(grid.n_nodes, 0.25), phi.values, kern.entries,
            grid.weight, PARAMS.bigF, PARAMS.mu, PARAMS.sigma, PARAMS.v,
            PARAMS.LambdaTotal, dt, n_steps, fp_tol, fp_max_iter, stat_tol)


def test_both_backends_are_available():
    assert available_backends() == ("numpy", "numba")


def test_explicit_selection():
    assert select_backend("numpy").__name__.endswith("_numpy")
    assert select_backend("numba").__name__.endswith("_numba")
    with pytest.raises(ValueError):
        select_backend("fortran")


def test_env_variable_drives_default(monkeypatch):
    monkeypatch.setenv(BACKEND_ENV, "numpy")
    assert select_backend().__name__.endswith("_numpy")
    monkeypatch.setenv(BACKEND_ENV, "numba")
    assert select_backend().__name__.endswith("_numba")
    monkeypatch.setenv(BACKEND_ENV, "auto")
    assert select_backend().__name__.endswith(("_numpy", "_numba"))


def test_trajectories_agree_across_backends():
    grid, kern, lam0, phi = _state()
    res_np = simulate(lam0, phi, kern, PARAMS,
                      NumericsConfig(seed=3, max_steps=2000, stat_tol=1e-10),
                      backend="numpy")
    res_nb = simulate(lam0, phi, kern, PARAMS,
                      NumericsConfig(seed=3, max_steps=2000, stat_tol=1e-10),
                      backend="numba")
    assert res_np.steps_taken == res_nb.steps_taken
    assert np.max(np.abs(res_np.final_lambda.values
                         - res_nb.final_lambda.values)) < 1e-12


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_status_step_budget(name):
    grid, kern, lam0, phi = _state()
    be = select_backend(name)
    lam = lam0.values.copy()
    done, status, drift, change, sweeps, resid = be.advance(
        *_advance_args(grid, kern, lam, phi, n_steps=50))
    assert (done, status) == (50, STATUS_RAN)
    assert drift < 1e-13
    assert change > 0.0
    assert sweeps >= 50


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_status_stationary(name):
    grid, kern, lam0, phi = _state()
    be = select_backend(name)
    lam = lam0.values.copy()
    done, status, *_ = be.advance(
        *_advance_args(grid, kern, lam, phi, n_steps=50, stat_tol=1e3))
    assert (done, status) == (1, STATUS_STATIONARY)


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_status_negative_leaves_state_uncommitted(name):
    grid, kern, lam0, phi = _state()
    be = select_backend(name)
    lam = lam0.values.copy()
    before = lam.copy()
    done, status, *_ = be.advance(
        *_advance_args(grid, kern, lam, phi, dt=1e6, n_steps=10))
    assert (done, status) == (0, STATUS_NEGATIVE)
    assert np.array_equal(lam, before)


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_status_wage_failure_leaves_state_uncommitted(name):
    grid, kern, lam0, phi = _state()
    be = select_backend(name)
    lam = lam0.values.copy()
    before = lam.copy()
    done, status, _, _, _, resid = be.advance(
        *_advance_args(grid, kern, lam, phi, n_steps=10, fp_max_iter=1))
    assert (done, status) == (0, STATUS_WAGE_FAIL)
    assert np.array_equal(lam, before)
    assert resid > 1e-12
