"""Jit-compiled explicit Euler stepper, arithmetic-identical to the numpy twin."""

import numba
import numpy as np

NAME = "numba"


@numba.njit(cache=True)
def _advance(lam, w, phi, K, weight, bigF, mu, sigma, v, lambda_total, dt,
             n_steps, fp_tol, fp_max_iter, stat_tol):
    n = lam.shape[0]
    m_exp = mu / (sigma - 1.0)
    coef = mu * weight / (sigma * bigF)
    scale = weight / bigF
    max_drift = 0.0
    fp_total = 0
    last_change = np.inf
    last_resid = np.inf
    steps = 0
    y = np.empty(n, dtype=np.float64)
    for _ in range(n_steps):
        P = np.dot(K, lam)
        for i in range(n):
            P[i] = P[i] * scale
        converged = False
        resid = np.inf
        for _sweep in range(fp_max_iter):
            for i in range(n):
                y[i] = (w[i] * lam[i] + phi[i]) / P[i]
            w_new = np.dot(K, y)
            resid = 0.0
            for i in range(n):
                w_new[i] = coef * w_new[i]
                d = abs(w_new[i] - w[i])
                if d > resid:
                    resid = d
                w[i] = w_new[i]
            fp_total += 1
            if resid <= fp_tol:
                converged = True
                break
        last_resid = resid
        if not converged:
            return steps, 3, max_drift, last_change, fp_total, last_resid
        for i in range(n):
            y[i] = w[i] * P[i] ** m_exp
        omega_avg = np.dot(y, lam) * weight / lambda_total
        negative = False
        for i in range(n):
            if lam[i] + (dt * v) * (y[i] - omega_avg) * lam[i] < 0.0:
                negative = True
                break
        if negative:
            return steps, 2, max_drift, last_change, fp_total, last_resid
        change = 0.0
        mass = 0.0
        for i in range(n):
            d = (dt * v) * (y[i] - omega_avg) * lam[i]
            lam[i] = lam[i] + d
            ad = abs(d)
            if ad > change:
                change = ad
            mass += lam[i]
        drift = abs(mass * weight - lambda_total)
        if drift > max_drift:
            max_drift = drift
        last_change = change
        steps += 1
        if change < stat_tol:
            return steps, 1, max_drift, last_change, fp_total, last_resid
    return steps, 0, max_drift, last_change, fp_total, last_resid


def advance(lam, w, phi, K, weight, bigF, mu, sigma, v, lambda_total, dt,
            n_steps, fp_tol, fp_max_iter, stat_tol):
    """Same contract as the numpy backend's advance."""
    steps, status, drift, change, fp_total, resid = _advance(
        lam, w, phi, K, float(weight), float(bigF), float(mu), float(sigma),
        float(v), float(lambda_total), float(dt), int(n_steps), float(fp_tol),
        int(fp_max_iter), float(stat_tol),
    )
    return int(steps), int(status), float(drift), float(change), int(fp_total), float(resid)
