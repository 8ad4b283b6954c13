"""Pure-NumPy cyclic coordinate descent for the complex weighted LASSO.

Reference kernel; the compiled extension in ``_cd_cy`` implements the same
update order and stopping rule, so both backends produce identical iterates
up to floating-point rounding.
"""

import numpy as np


def cd_weighted_lasso(X, y, lam, col_norm2, tol, max_iter, h0=None):
    """Minimize 0.5*||y - X h||^2 + sum_i lam[i] * |h_i| by cyclic coordinate descent.

    Each coordinate update is the complex soft threshold
    ``h_i <- S(X_i^H r + ||X_i||^2 h_i, lam[i]) / ||X_i||^2`` where ``r`` is
    the current residual and S shrinks the modulus, preserving phase.
    Coordinates whose column is identically zero stay fixed at their start
    value (zero when ``h0`` is None).

    Returns ``(h, sweeps, converged)``; converged means the largest
    coordinate change in the final sweep fell below ``tol``.
    """
    n, p = X.shape
    h = np.zeros(p, dtype=np.complex128) if h0 is None else h0.astype(np.complex128).copy()
    r = y - X @ h
    sweeps = 0
    converged = False
    for sweeps in range(1, max_iter + 1):
        max_delta = 0.0
        for i in range(p):
            n2 = col_norm2[i]
            if n2 == 0.0:
                continue
            xi = X[:, i]
            h_old = h[i]
            rho = np.vdot(xi, r) + n2 * h_old
            mag = abs(rho)
            t = lam[i]
            if mag <= t:
                h_new = 0.0 + 0.0j
            else:
                h_new = rho * (1.0 - t / mag) / n2
            if h_new != h_old:
                r += xi * (h_old - h_new)
                h[i] = h_new
                delta = abs(h_new - h_old)
                if delta > max_delta:
                    max_delta = delta
        if max_delta < tol:
            converged = True
            break
    return h, sweeps, converged
