"""Compiled coordinate-descent kernels for the penalised VAR solvers.

Both kernels minimise a quadratic-plus-L1 objective over the K x Kp
coefficient matrix A by cyclic coordinate descent with exact single-variable
updates (soft thresholding), maintaining the gradient cross-product
incrementally. They mutate A in place and return the number of full sweeps
used, or ``max_sweeps + 1`` when the tolerance was not reached.

Shapes: G = L L' is (Kp, Kp), C = Y L' is (K, Kp), sigma_inv is (K, K).
"""

import numba


@numba.njit(cache=True)
def _soft(z, threshold):
    if z > threshold:
        return z - threshold
    if z < -threshold:
        return z + threshold
    return 0.0


@numba.njit(cache=True)
def cd_squared_error(A, G, C, lam, tol, max_sweeps):
    """Minimise ||Y - A L||_F^2 + lam * sum|A| in place.

    The optimal coordinate value is soft(z, lam/2) / G[c, c] with
    z = C[r, c] - (A G)[r, c] + G[c, c] A[r, c].
    """
    K, q = A.shape
    AG = A @ G
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for r in range(K):
            for c in range(q):
                gcc = G[c, c]
                if gcc <= 0.0:
                    continue
                old = A[r, c]
                z = C[r, c] - AG[r, c] + gcc * old
                new = _soft(z, 0.5 * lam) / gcc
                if new != old:
                    d = new - old
                    A[r, c] = new
                    for cc in range(q):
                        AG[r, cc] += d * G[c, cc]
                    step = abs(d)
                    if step > max_delta:
                        max_delta = step
        if max_delta < tol:
            return sweep
    return max_sweeps + 1


@numba.njit(cache=True)
def cd_weighted_error(A, G, C, sigma_inv, lam, tol, max_sweeps):
    """Minimise tr(sigma_inv (Y - A L)(Y - A L)') + lam * sum|A| in place.

    The optimal coordinate value is soft(z, lam/2) / (sigma_inv[r, r] G[c, c])
    with z = (sigma_inv C)[r, c] - (sigma_inv A G)[r, c]
           + sigma_inv[r, r] G[c, c] A[r, c].
    """
    K, q = A.shape
    SC = sigma_inv @ C
    W = sigma_inv @ (A @ G)
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for r in range(K):
            srr = sigma_inv[r, r]
            for c in range(q):
                curv = srr * G[c, c]
                if curv <= 0.0:
                    continue
                old = A[r, c]
                z = SC[r, c] - W[r, c] + curv * old
                new = _soft(z, 0.5 * lam) / curv
                if new != old:
                    d = new - old
                    A[r, c] = new
                    for rr in range(K):
                        s = d * sigma_inv[rr, r]
                        for cc in range(q):
                            W[rr, cc] += s * G[c, cc]
                    step = abs(d)
                    if step > max_delta:
                        max_delta = step
        if max_delta < tol:
            return sweep
    return max_sweeps + 1
