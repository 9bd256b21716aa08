import math

import numpy as np
import pytest

from racetrack_fe.core import Field, ModelParams, NumericsConfig, make_grid, uniform_field
from racetrack_fe.dynamics import replicator_rhs
from racetrack_fe.equilibrium import instantaneous_equilibrium
from racetrack_fe.kernel import build_kernel
from racetrack_fe.theory import apriori_bounds, contraction_modulus, modulus_from_ratios

LOW_TAU = ModelParams(tau=0.01)
CFG = NumericsConfig()

# frozen reference constants at tau = 0.01, b = 0.5, defaults otherwise
REF = {
    "contraction_modulus": 0.63890866397696955,
    "G_L": 0.81649658092772603,
    "G_U": 1.4593476441855446,
    "w_U": 1.1795882836989842,
    "omega_U": 1.3321644132962596,
    "K": 4.9956165498609737,
    "L_G": 1.553983089374207,
    "L_w": 8.3485711142394941,
    "L_omega": 10.949684622275887,
    "L": 46.389974986719608,
}


def test_modulus_limit_is_mu_over_sigma():
    assert modulus_from_ratios(0.6, 3.0, 1.0, 1.0) == 0.6 / 3.0


def test_contraction_modulus_reference_points():
    assert math.isclose(contraction_modulus(LOW_TAU, 1.0, 1.0),
                        0.21296955465898987, rel_tol=1e-14)
    assert math.isclose(contraction_modulus(ModelParams(), 1.0, 1.0),
                        107.09833110495293, rel_tol=1e-13)


def test_contraction_modulus_validation():
    with pytest.raises(ValueError):
        contraction_modulus(LOW_TAU, 0.0, 1.0)
    with pytest.raises(ValueError):
        contraction_modulus(LOW_TAU, 2.0, 1.0)  # Lambda1 > Lambda2


def test_bounds_reference_values():
    bounds = apriori_bounds(LOW_TAU, 0.5)
    assert bounds.applicable
    assert bounds.violated is None
    assert bounds.Lambda1 == 0.5
    assert bounds.Lambda2 == 1.5
    for name, want in REF.items():
        assert math.isclose(getattr(bounds, name), want, rel_tol=1e-12), name
    assert bounds.C_G == bounds.G_U  # sigma = 3 > 2 picks the upper constant


def test_bounds_validation():
    with pytest.raises(ValueError):
        apriori_bounds(LOW_TAU, 0.0)
    with pytest.raises(ValueError):
        apriori_bounds(LOW_TAU, 1.0)  # b must stay below the total mass


def test_bounds_not_applicable_outside_contraction_regime():
    bounds = apriori_bounds(ModelParams(), 0.5)  # tau=1: modulus ~ 107
    assert not bounds.applicable
    assert "modulus" in bounds.violated
    assert math.isnan(bounds.w_U)
    assert math.isnan(bounds.L)
    # the geometry-only constants stay reportable
    assert bounds.G_L > 0.0
    assert bounds.G_U > bounds.G_L


def test_case_split_for_price_lipschitz_base():
    lo = apriori_bounds(ModelParams(tau=0.01, sigma=1.9), 0.2)
    hi = apriori_bounds(ModelParams(tau=0.01, sigma=2.1), 0.2)
    assert lo.C_G == lo.G_L
    assert hi.C_G == hi.G_U


def test_bounds_weakly_increase_with_ball_radius():
    names = ("G_U", "w_U", "omega_U", "K", "L")
    prev = None
    for b in (0.1, 0.2, 0.3, 0.4, 0.5):
        cur = apriori_bounds(LOW_TAU, b)
        assert cur.applicable
        if prev is not None:
            for name in names:
                assert getattr(cur, name) >= getattr(prev, name), name
        prev = cur


def test_solver_respects_wage_and_rhs_bounds():
    params = LOW_TAU
    bounds = apriori_bounds(params, 0.5)
    grid = make_grid(129, params.rho)
    kern = build_kernel(grid, params)
    phi = uniform_field(grid, params.PhiTotal)
    rng = np.random.default_rng(17)
    lam_bar = params.LambdaTotal / (2.0 * math.pi * params.rho)
    for _ in range(10):
        vals = lam_bar * rng.uniform(0.4, 1.6, grid.n_nodes)
        lam = Field(vals, grid)
        # keep the density inside the L1 ball of radius b around uniform
        dev = float(np.abs(vals - lam_bar).sum() * grid.weight)
        assert dev < 0.5
        eq = instantaneous_equilibrium(lam, phi, kern, params, CFG)
        assert eq.w.values.max() <= bounds.w_U * (1.0 + 1e-12)
        # the population average keeps the model's fixed 1/Lambda normalization
        rhs = replicator_rhs(lam, eq.omega, params)
        rhs_l1 = float(np.abs(rhs.values).sum() * grid.weight)
        assert rhs_l1 <= bounds.K * (1.0 + 1e-12)


def test_rhs_lipschitz_spot_check():
    params = LOW_TAU
    bounds = apriori_bounds(params, 0.5)
    grid = make_grid(65, params.rho)
    kern = build_kernel(grid, params)
    phi = uniform_field(grid, params.PhiTotal)
    rng = np.random.default_rng(23)
    lam_bar = params.LambdaTotal / (2.0 * math.pi * params.rho)

    def rhs_of(vals):
        lam = Field(vals, grid)
        eq = instantaneous_equilibrium(lam, phi, kern, params, CFG)
        return replicator_rhs(lam, eq.omega, params).values

    for _ in range(10):
        a = lam_bar * rng.uniform(0.6, 1.4, grid.n_nodes)
        b = lam_bar * rng.uniform(0.6, 1.4, grid.n_nodes)
        gap = float(np.abs(a - b).sum() * grid.weight)
        resp = float(np.abs(rhs_of(a) - rhs_of(b)).sum() * grid.weight)
        assert resp <= bounds.L * gap * (1.0 + 1e-9)
