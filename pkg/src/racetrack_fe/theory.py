"""Explicit solver-regime constants: contraction modulus and a-priori bounds.

These are diagnostics, not gates. The wage iteration provably contracts when
the modulus below is under 1; simulations routinely converge far outside that
regime, so callers only warn on violation.
"""

from dataclasses import dataclass
import math

from .core import ModelParams


@dataclass(frozen=True)
class TheoryBounds:
    """A-priori bounds valid for densities within mass b of the reference.

    Admissible densities have total mass in [Lambda1, Lambda2]. K bounds the
    integrated migration speed; L is the Lipschitz constant of the full
    right-hand side in the integral norm. Both depend on params and b only.
    """

    b: float
    Lambda1: float
    Lambda2: float
    contraction_modulus: float
    applicable: bool
    violated: str | None
    G_L: float
    G_U: float
    w_U: float
    omega_U: float
    K: float
    C_G: float
    L_G: float
    L_w: float
    L_omega: float
    L: float


def modulus_from_ratios(mu: float, sigma: float, t_ratio: float, mass_ratio: float) -> float:
    """Contraction factor (mu/sigma) * t_ratio^(sigma-1) * mass_ratio.

    t_ratio is the transport-cost spread T_max/T_min and mass_ratio the
    admissible mass spread Lambda2/Lambda1; at t_ratio = mass_ratio = 1 the
    factor reduces to mu/sigma exactly.
    """
    return (mu / sigma) * t_ratio ** (sigma - 1.0) * mass_ratio


def _t_max(params: ModelParams) -> float:
    return math.exp(params.tau * params.rho * math.pi)


def contraction_modulus(params: ModelParams, Lambda1: float, Lambda2: float) -> float:
    """Sup-norm contraction factor of the wage fixed-point map."""
    if not Lambda1 > 0.0:
        raise ValueError(f"Lambda1 must be positive, got {Lambda1}")
    if Lambda2 < Lambda1:
        raise ValueError(f"need Lambda1 <= Lambda2, got {Lambda1} > {Lambda2}")
    return modulus_from_ratios(params.mu, params.sigma, _t_max(params), Lambda2 / Lambda1)


def apriori_bounds(params: ModelParams, b: float) -> TheoryBounds:
    """All explicit constants for densities within integral distance b of uniform.

    When the contraction condition fails the bounds that depend on it are
    reported as nan with the violated inequality spelled out.
    """
    lam_total = params.LambdaTotal
    if not 0.0 < b < lam_total:
        raise ValueError(f"b must lie in (0, LambdaTotal), got {b}")
    L1 = lam_total - b
    L2 = lam_total + b
    mu, s, F = params.mu, params.sigma, params.bigF
    t_min = 1.0  # transport factor at zero distance
    t_max = _t_max(params)
    mod = contraction_modulus(params, L1, L2)

    G_L = F ** (1.0 / (s - 1.0)) * t_min * L2 ** (1.0 / (1.0 - s))
    G_U = F ** (1.0 / (s - 1.0)) * t_max * L1 ** (1.0 / (1.0 - s))
    L_G = (
        (1.0 / (s - 1.0))
        * F ** (1.0 / (s - 1.0))
        * t_max**s
        * t_min ** (1.0 - s)
        * L1 ** (s / (1.0 - s))
    )
    C_G = G_L if s <= 2.0 else G_U

    if mod >= 1.0:
        nan = math.nan
        return TheoryBounds(
            b=b, Lambda1=L1, Lambda2=L2, contraction_modulus=mod,
            applicable=False,
            violated=(
                "contraction modulus (mu/sigma)*(T_max/T_min)^(sigma-1)"
                f"*Lambda2/Lambda1 = {mod:.6g} >= 1"
            ),
            G_L=G_L, G_U=G_U, w_U=nan, omega_U=nan, K=nan,
            C_G=C_G, L_G=L_G, L_w=nan, L_omega=nan, L=nan,
        )

    w_U = ((mu / s) * (t_max / t_min) ** (s - 1.0) * params.PhiTotal / L1) / (1.0 - mod)
    omega_U = w_U * G_L ** (-mu)
    K = params.v * omega_U * L2 * (1.0 + L2 / lam_total)
    L_w = (
        (mu / (s * F))
        * (
            (s - 1.0) * C_G ** (s - 2.0) * L_G * t_min ** (1.0 - s) * (w_U * L2 + params.PhiTotal)
            + w_U * G_U ** (s - 1.0) * t_min ** (1.0 - s)
        )
        / (1.0 - (mu / (s * F)) * L2 * G_U ** (s - 1.0) * t_min ** (1.0 - s))
    )
    L_omega = mu * w_U * G_L ** (-mu - 1.0) * L_G + G_L ** (-mu) * L_w
    L = L2 * L_omega + omega_U + L2 * (2.0 * omega_U + L2 * L_omega) / lam_total
    return TheoryBounds(
        b=b, Lambda1=L1, Lambda2=L2, contraction_modulus=mod,
        applicable=True, violated=None,
        G_L=G_L, G_U=G_U, w_U=w_U, omega_U=omega_U, K=K,
        C_G=C_G, L_G=L_G, L_w=L_w, L_omega=L_omega, L=L,
    )
