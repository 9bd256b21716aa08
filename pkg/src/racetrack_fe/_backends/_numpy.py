"""Pure-numpy explicit Euler stepper for the replicator dynamics."""

import numpy as np

NAME = "numpy"


def advance(lam, w, phi, K, weight, bigF, mu, sigma, v, lambda_total, dt,
            n_steps, fp_tol, fp_max_iter, stat_tol):
    """Run up to n_steps Euler steps in place on lam and w.

    Returns (steps_done, status, max_mass_drift, last_max_change,
    fp_sweeps_total, last_fp_residual) with status 0 = ran out of steps,
    1 = stationary (per-node |change| < stat_tol), 2 = negativity (step not
    committed), 3 = wage iteration failed (step not committed).
    """
    m_exp = mu / (sigma - 1.0)
    coef = mu * weight / (sigma * bigF)
    scale = weight / bigF
    max_drift = 0.0
    fp_total = 0
    last_change = np.inf
    last_resid = np.inf
    steps = 0
    for _ in range(n_steps):
        P = K @ lam
        P *= scale
        converged = False
        resid = np.inf
        for _sweep in range(fp_max_iter):
            w_new = coef * (K @ ((w * lam + phi) / P))
            resid = float(np.max(np.abs(w_new - w)))
            w[:] = w_new
            fp_total += 1
            if resid <= fp_tol:
                converged = True
                break
        last_resid = resid
        if not converged:
            return steps, 3, max_drift, last_change, fp_total, last_resid
        omega = w * P ** m_exp
        omega_avg = float(np.dot(omega, lam)) * weight / lambda_total
        delta = (dt * v) * (omega - omega_avg) * lam
        new_lam = lam + delta
        if new_lam.min() < 0.0:
            return steps, 2, max_drift, last_change, fp_total, last_resid
        lam[:] = new_lam
        drift = abs(float(lam.sum()) * weight - lambda_total)
        if drift > max_drift:
            max_drift = drift
        last_change = float(np.max(np.abs(delta)))
        steps += 1
        if last_change < stat_tol:
            return steps, 1, max_drift, last_change, fp_total, last_resid
    return steps, 0, max_drift, last_change, fp_total, last_resid
