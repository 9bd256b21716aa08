import math

import numpy as np
import pytest

from racetrack_fe.core import Field, ModelParams, NumericsConfig, make_grid, perturbed_uniform, uniform_field
from racetrack_fe.dynamics import (
    average_real_wage,
    euler_step,
    integrate_fixed,
    replicator_rhs,
    rk4_step,
    simulate,
)
from racetrack_fe.equilibrium import instantaneous_equilibrium
from racetrack_fe.errors import NegativeDensityError, WageConvergenceError
from racetrack_fe.kernel import build_kernel

PARAMS = ModelParams()
CFG = NumericsConfig()


def _setup(n=64, params=PARAMS, seed=None):
    grid = make_grid(n, params.rho)
    kern = build_kernel(grid, params)
    phi = uniform_field(grid, params.PhiTotal)
    if seed is None:
        lam = uniform_field(grid, params.LambdaTotal)
    else:
        lam = perturbed_uniform(grid, params.LambdaTotal, NumericsConfig(seed=seed))
    return grid, kern, lam, phi


def test_average_real_wage_at_uniform():
    grid, kern, lam, phi = _setup()
    eq = instantaneous_equilibrium(lam, phi, kern, PARAMS, CFG)
    avg = average_real_wage(lam, eq.omega, PARAMS.LambdaTotal)
    assert math.isclose(avg, eq.omega.values[0], rel_tol=1e-12)
    with pytest.raises(ValueError):
        average_real_wage(lam, eq.omega, 0.0)


def test_rhs_vanishes_at_uniform():
    grid, kern, lam, phi = _setup()
    eq = instantaneous_equilibrium(lam, phi, kern, PARAMS, CFG)
    rhs = replicator_rhs(lam, eq.omega, PARAMS)
    assert np.all(np.abs(rhs.values) < 1e-15)


def test_rhs_integrates_to_zero():
    # migration redistributes mass, it never creates or destroys it
    grid, kern, lam, phi = _setup(seed=5)
    eq = instantaneous_equilibrium(lam, phi, kern, PARAMS, CFG)
    rhs = replicator_rhs(lam, eq.omega, PARAMS)
    assert abs(rhs.integral()) < 1e-15


def test_zero_dt_steps_are_identity():
    grid, kern, lam, phi = _setup(seed=1)
    e = euler_step(lam, phi, kern, PARAMS, CFG, dt=0.0)
    r = rk4_step(lam, phi, kern, PARAMS, CFG, dt=0.0)
    assert np.array_equal(e.values, lam.values)
    assert np.array_equal(r.values, lam.values)


def test_single_euler_step_moves_toward_higher_real_wage():
    grid, kern, lam, phi = _setup(seed=1)
    eq = instantaneous_equilibrium(lam, phi, kern, PARAMS, CFG)
    stepped = euler_step(lam, phi, kern, PARAMS, CFG)
    avg = average_real_wage(lam, eq.omega, PARAMS.LambdaTotal)
    gained = eq.omega.values > avg
    assert np.all(stepped.values[gained] >= lam.values[gained])
    assert np.all(stepped.values[~gained] <= lam.values[~gained])


def test_euler_step_conserves_mass():
    grid, kern, lam, phi = _setup(seed=2)
    stepped = euler_step(lam, phi, kern, PARAMS, CFG)
    assert math.isclose(stepped.integral(), PARAMS.LambdaTotal, rel_tol=1e-13)


def test_rk4_and_euler_agree_to_first_order():
    grid, kern, lam, phi = _setup(seed=2)
    dt = 1e-4
    e = euler_step(lam, phi, kern, PARAMS, CFG, dt=dt)
    r = rk4_step(lam, phi, kern, PARAMS, CFG, dt=dt)
    # the schemes differ at O(dt^2) per step
    assert np.max(np.abs(e.values - r.values)) < 1e-6


def test_negative_density_raised_for_huge_step():
    grid, kern, lam, phi = _setup(seed=3)
    with pytest.raises(NegativeDensityError):
        euler_step(lam, phi, kern, PARAMS, CFG, dt=1e6)


def test_simulate_uniform_converges_at_first_step():
    grid, kern, lam, phi = _setup()
    res = simulate(lam, phi, kern, PARAMS, CFG)
    assert res.converged
    assert res.steps_taken == 1
    assert np.allclose(res.final_lambda.values, lam.values, rtol=0.0, atol=1e-14)


def test_simulate_validates_start():
    grid, kern, lam, phi = _setup()
    bad_mass = Field(lam.values * 1.5, grid)
    with pytest.raises(ValueError, match="mass"):
        simulate(bad_mass, phi, kern, PARAMS, CFG)


def test_simulate_records_snapshots():
    params = ModelParams(tau=0.5)
    grid, kern, _, phi = _setup(params=params)
    lam0 = perturbed_uniform(grid, params.LambdaTotal, NumericsConfig(seed=4))
    cfg = NumericsConfig(seed=4, max_steps=500, stat_tol=1e-10)
    res = simulate(lam0, phi, kern, params, cfg, snapshot_stride=100)
    assert not res.converged
    assert res.steps_taken == 500
    times = [t for t, _ in res.trajectory_samples]
    assert times[0] == 0.0
    assert math.isclose(times[-1], 500 * cfg.dt, rel_tol=1e-12)
    assert len(times) == 6  # t = 0, 1, 2, 3, 4, 5
    # snapshots are copies, not views of the evolving state
    assert not np.array_equal(res.trajectory_samples[0][1].values,
                              res.final_lambda.values)


def test_simulate_wage_failure_carries_step_index():
    grid, kern, _, phi = _setup(params=PARAMS)
    lam0 = perturbed_uniform(grid, PARAMS.LambdaTotal, NumericsConfig(seed=4))
    cfg = NumericsConfig(fp_max_iter=1, max_steps=100)
    with pytest.raises(WageConvergenceError) as err:
        simulate(lam0, phi, kern, PARAMS, cfg)
    assert err.value.step == 1


def test_integrate_fixed_runs_exact_step_count():
    grid, kern, lam, phi = _setup()  # uniform start would stop simulate at once
    final, samples, drift = integrate_fixed(lam, phi, kern, PARAMS, CFG,
                                            n_steps=250, record_stride=50)
    assert len(samples) == 6
    assert samples[-1][0] == pytest.approx(250 * CFG.dt)
    assert drift < 1e-14


def test_integrate_fixed_mass_conserved_over_long_run():
    params = ModelParams(tau=0.5)
    grid, kern, _, phi = _setup(params=params)
    lam0 = perturbed_uniform(grid, params.LambdaTotal, NumericsConfig(seed=8))
    final, _, drift = integrate_fixed(lam0, phi, kern, params, CFG, n_steps=5000)
    assert drift < 1e-12
    assert np.all(final.values >= 0.0)


def test_growth_of_unstable_perturbation():
    # tau=0.5 leaves mode 2 unstable at rate ~6e-3, so amplifying a mixed
    # perturbation tenfold takes on the order of t=1000
    params = ModelParams(tau=0.5)
    grid, kern, _, phi = _setup(params=params)
    lam0 = perturbed_uniform(grid, params.LambdaTotal, NumericsConfig(seed=8))
    dev0 = np.max(np.abs(lam0.values - lam0.values.mean()))
    final, _, _ = integrate_fixed(lam0, phi, kern, params, CFG, n_steps=100000)
    dev1 = np.max(np.abs(final.values - final.values.mean()))
    assert dev1 > 10.0 * dev0
