"""Pure numpy kernels.

Every accumulation runs in a fixed order (ascending column, then ascending
row), one elementwise array operation at a time, so the bits of a cell's
result do not depend on how many cells are processed together.  The
compiled kernels follow exactly the same order.
"""

from __future__ import annotations

import numpy as np

from ._layout import HORNER_2D


def _matvec(U: np.ndarray, W: np.ndarray) -> np.ndarray:
    P = U.shape[0]
    C, S = W.shape
    Z = np.zeros((P, C))
    for c in range(S):
        col = W[:, c]
        if np.any(col != 0.0):
            Z += U[:, c, None] * col[None, :]
    return Z


def _quadform(Z: np.ndarray, M: np.ndarray) -> np.ndarray:
    C = M.shape[0]
    MZ = _matvec(Z, M)
    out = np.zeros(Z.shape[0])
    for r in range(C):
        if np.any(M[r] != 0.0):
            out += Z[:, r] * MZ[:, r]
    return out


def reconstruct(stencils, W, M, d, tau_c, eps, l, zmode, inv_dx2):
    """Blended coefficients for a batch of stencils.

    Returns ``(coef, omega, indicators, tau)`` with shapes (P, C), (P, K),
    (P, K) and (P,).
    """
    U = np.ascontiguousarray(stencils, dtype=float)
    K = W.shape[0]
    Z = [_matvec(U, W[k]) for k in range(K)]
    ind = np.empty((U.shape[0], K))
    for k in range(K):
        ind[:, k] = _quadform(Z[k], M) * inv_dx2
    tau = np.zeros(U.shape[0])
    for k in range(K):
        tau = tau + tau_c[k] * ind[:, k]
    tau = np.abs(tau)
    alpha = np.empty_like(ind)
    for k in range(K):
        s = ind[:, k] + eps
        if zmode:
            r = tau / s
            q = r * r if l == 2.0 else np.power(r, l)
            alpha[:, k] = d[k] * (1.0 + q)
        else:
            q = s * s if l == 2.0 else np.power(s, l)
            alpha[:, k] = d[k] / q
    total = np.zeros(U.shape[0])
    for k in range(K):
        total = total + alpha[:, k]
    omega = alpha / total[:, None]
    p0 = Z[0].copy()
    for k in range(1, K):
        p0 = p0 - d[k] * Z[k]
    p0 = p0 / d[0]
    coef = omega[:, 0, None] * p0
    for k in range(1, K):
        coef = coef + omega[:, k, None] * Z[k]
    return coef, omega, ind, tau


def eval_poly_1d(coef, cells, xh):
    z = coef[cells]
    return ((z[:, 3] * xh + z[:, 2]) * xh + z[:, 1]) * xh + z[:, 0]


def eval_poly_2d(coef, cells, xh, yh):
    z = coef[cells]
    rows = []
    for b in range(4):
        i3, i2, i1, i0 = HORNER_2D[b]
        rows.append(((z[:, i3] * xh + z[:, i2]) * xh + z[:, i1]) * xh + z[:, i0])
    return ((rows[3] * yh + rows[2]) * yh + rows[1]) * yh + rows[0]


def pointwise_1d(stencils, xh, W, M, d, tau_c, eps, l, zmode, inv_dx2):
    coef = reconstruct(stencils, W, M, d, tau_c, eps, l, zmode, inv_dx2)[0]
    return eval_poly_1d(coef, np.arange(len(coef)), xh)


def pointwise_2d(stencils, xh, yh, W, M, d, tau_c, eps, l, zmode, inv_dx2):
    coef = reconstruct(stencils, W, M, d, tau_c, eps, l, zmode, inv_dx2)[0]
    return eval_poly_2d(coef, np.arange(len(coef)), xh, yh)
