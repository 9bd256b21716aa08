"""Homogeneous stationary state and Fourier linear stability analysis.

Around the uniform state, a perturbation proportional to exp(i*k*theta) grows
or decays at the rate Gamma_k. The whole spectrum is controlled by a single
scalar Z_k in (0, 1), monotone in alpha = tau*(sigma-1): mode k is stable
exactly when Z_k exceeds the threshold Z*, so each mode has one critical
transport cost tau_k* where Gamma_k crosses zero.
"""

from dataclasses import dataclass, replace
import math

from .core import TWO_PI, ModelParams
from .errors import BracketError
from .kernel import kernel_integral_closed_form


@dataclass(frozen=True)
class HomogeneousState:
    lambda_bar: float
    phi_bar: float
    Y_bar: float
    w_bar: float
    G_bar: float
    omega_bar: float


@dataclass(frozen=True)
class ModeDiagnostics:
    k: int
    Ek: float
    Zk: float
    Gamma_k: float
    stable: bool


@dataclass(frozen=True, eq=False)
class StabilityReport:
    params: ModelParams
    homogeneous: HomogeneousState
    modes: list
    z_star: float
    no_black_hole: bool
    critical_taus: dict  # |k| -> tau_k* (nan when no crossing exists)


def homogeneous_state(params: ModelParams) -> HomogeneousState:
    """Closed-form uniform stationary solution."""
    lam = params.LambdaTotal / (TWO_PI * params.rho)
    phi = params.PhiTotal / (TWO_PI * params.rho)
    w = (params.mu * phi / (params.sigma * lam)) / (1.0 - params.mu / params.sigma)
    Y = w * lam + phi
    ring = kernel_integral_closed_form(params.alpha, params.rho)
    G = (lam * ring / params.bigF) ** (1.0 / (1.0 - params.sigma))
    omega = w * G ** (-params.mu)
    return HomogeneousState(lam, phi, Y, w, G, omega)


def _mode_factors(k: int, alpha: float, rho: float):
    # numerator 1 - (-1)^|k| e^(-alpha rho pi) and denominator 1 - e^(-alpha rho pi),
    # written with expm1 so tiny alpha*rho keeps full precision
    x = alpha * rho * math.pi
    denom = -math.expm1(-x)
    if abs(k) % 2 == 1:
        numer = 1.0 + math.exp(-x)
    else:
        numer = denom
    return numer, denom


def mode_E(k: int, alpha: float, rho: float) -> float:
    """Convolution eigenvalue of the transport kernel at integer frequency k."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    if k == 0:
        # the general expression reduces to the plain ring integral; computing
        # it directly keeps the two code paths bit-identical
        return kernel_integral_closed_form(alpha, rho)
    numer, _ = _mode_factors(k, alpha, rho)
    return 2.0 * alpha * rho * rho * numer / (k * k + (alpha * rho) ** 2)


def mode_Z(k: int, alpha: float, rho: float) -> float:
    """Normalized spectral factor Z_k in (0, 1), monotone in alpha."""
    if k == 0:
        raise ValueError("mode 0 is constrained out by mass conservation")
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    a2 = (alpha * rho) ** 2
    numer, denom = _mode_factors(k, alpha, rho)
    return a2 * numer / ((k * k + a2) * denom)


def z_star(params: ModelParams) -> float:
    """Stability threshold: mode k is stable exactly when Z_k > Z*."""
    h = homogeneous_state(params)
    s = params.sigma
    return (h.w_bar + h.w_bar * s / (s - 1.0)) / (
        params.mu * h.w_bar / (s - 1.0) + h.Y_bar / h.lambda_bar
    )


def no_black_hole(params: ModelParams) -> bool:
    """True when sigma - 1 > mu, so high transport costs stabilize every mode."""
    return params.sigma - 1.0 > params.mu


def wage_response_ratio(k: int, params: ModelParams) -> float:
    """Linearized wage response w_hat_k / lambda_hat_k."""
    if k == 0:
        raise ValueError("mode 0 is constrained out by mass conservation")
    h = homogeneous_state(params)
    Z = mode_Z(k, params.alpha, params.rho)
    mu, s = params.mu, params.sigma
    numer = (mu * h.w_bar / (s * h.lambda_bar)) * Z - (
        mu * h.Y_bar / (s * h.lambda_bar**2)
    ) * Z * Z
    return numer / (1.0 - (mu / s) * Z)


def realwage_response_ratio(k: int, params: ModelParams) -> float:
    """Linearized real-wage response omega_hat_k / lambda_hat_k."""
    if k == 0:
        raise ValueError("mode 0 is constrained out by mass conservation")
    h = homogeneous_state(params)
    Z = mode_Z(k, params.alpha, params.rho)
    mu, s = params.mu, params.sigma
    inner = h.w_bar * Z / (1.0 - s) + ((h.Y_bar / h.lambda_bar) * Z * Z - h.w_bar * Z) / (
        s - mu * Z
    )
    return -(mu * h.G_bar ** (-mu) / h.lambda_bar) * inner


def eigenvalue(k: int, params: ModelParams) -> float:
    """Growth rate Gamma_k of the k-th perturbation mode; even in k."""
    if k == 0:
        raise ValueError("mode 0 is constrained out by mass conservation")
    h = homogeneous_state(params)
    return params.v * h.lambda_bar * realwage_response_ratio(k, params)


def critical_tau(k: int, sigma: float, params_base: ModelParams) -> float:
    """Transport cost where Gamma_k crosses zero, located by bisection.

    Z_k is monotone increasing in tau, so Gamma_k has a single sign change
    from unstable (low tau) to stable (high tau) whenever sigma - 1 > mu.
    """
    if k == 0:
        raise ValueError("mode 0 is constrained out by mass conservation")
    k = abs(k)
    base = replace(params_base, sigma=float(sigma))
    if not no_black_hole(base):
        raise BracketError(
            f"no crossing exists: sigma - 1 = {base.sigma - 1.0} does not exceed "
            f"mu = {base.mu}, so mode {k} never stabilizes"
        )

    def gamma(t: float) -> float:
        return eigenvalue(k, replace(base, tau=t))

    lo, hi = 1e-6, 50.0
    g_lo = gamma(lo)
    g_hi = gamma(hi)
    while g_lo <= 0.0 and lo > 1e-30:
        lo *= 1e-3
        g_lo = gamma(lo)
    while g_hi > 0.0 and hi < 1e9:
        hi *= 2.0
        g_hi = gamma(hi)
    if g_lo <= 0.0 or g_hi > 0.0:
        raise BracketError(
            f"no sign change bracketed for mode {k} at sigma={base.sigma}: "
            f"Gamma({lo})={g_lo:.3e}, Gamma({hi})={g_hi:.3e}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if gamma(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    root = 0.5 * (lo + hi)
    g_root = gamma(root)
    if abs(g_root) >= 1e-10:
        raise BracketError(
            f"bisection stalled for mode {k}: Gamma({root})={g_root:.3e}"
        )
    return root


def critical_curve(k: int, sigma_grid, params_base: ModelParams) -> list:
    """Per-sigma critical transport costs; failures recorded as nan gaps."""
    out = []
    for s in sigma_grid:
        try:
            t = critical_tau(k, float(s), params_base)
        except BracketError:
            t = math.nan
        out.append((float(s), t))
    return out


def stability_report(params: ModelParams, k_window: int = 20) -> StabilityReport:
    """Full spectrum over k in {-k_window..-1, 1..k_window} plus critical points."""
    if k_window < 1:
        raise ValueError(f"k_window must be at least 1, got {k_window}")
    zs = z_star(params)
    modes = []
    for k in list(range(-k_window, 0)) + list(range(1, k_window + 1)):
        g = eigenvalue(k, params)
        modes.append(
            ModeDiagnostics(
                k=k,
                Ek=mode_E(k, params.alpha, params.rho),
                Zk=mode_Z(k, params.alpha, params.rho),
                Gamma_k=g,
                stable=g < 0.0,
            )
        )
    taus = {}
    for k in range(1, k_window + 1):
        try:
            taus[k] = critical_tau(k, params.sigma, params)
        except BracketError:
            taus[k] = math.nan
    return StabilityReport(
        params=params,
        homogeneous=homogeneous_state(params),
        modes=modes,
        z_star=zs,
        no_black_hole=no_black_hole(params),
        critical_taus=taus,
    )
