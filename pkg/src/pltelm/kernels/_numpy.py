"""Pure-numpy kernels. Reference path and fallback when numba is disabled."""

import numpy as np

SIGMOID, SINE, HARDLIMIT = 0, 1, 2


def matmul(a, b):
    # Accumulate over k in a fixed order: entry (i, j) never depends on the
    # other columns of b, so widening b leaves existing columns bit-identical.
    out = np.zeros((a.shape[0], b.shape[1]))
    for k in range(a.shape[1]):
        out += a[:, k, None] * b[None, k, :]
    return out


def gauss_jordan_inverse(a, tol):
    n = a.shape[0]
    work = np.array(a, dtype=np.float64, copy=True)
    inv = np.eye(n)
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(work[col:, col])))
        if abs(work[pivot, col]) < tol:
            return inv, 1
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            inv[[col, pivot]] = inv[[pivot, col]]
        p = work[col, col]
        work[col] /= p
        inv[col] /= p
        factors = work[:, col].copy()
        factors[col] = 0.0
        work -= factors[:, None] * work[col][None, :]
        inv -= factors[:, None] * inv[col][None, :]
    return inv, 0


def _activate(z, kind):
    if kind == SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    if kind == SINE:
        return np.sin(z)
    return (z >= 0.0).astype(np.float64)


def hidden_layer(x, weights, biases, kind):
    return _activate(matmul(x, weights.T) + biases[None, :], kind)


def rls_step(m, beta, h, t, tol):
    """One chunk of recursive least squares; returns (M', beta', status)."""
    mht = matmul(m, h.T)
    s = np.eye(h.shape[0]) + matmul(h, mht)
    s_inv, status = gauss_jordan_inverse(s, tol)
    if status:
        return m, beta, status
    m_new = m - matmul(matmul(mht, s_inv), mht.T)
    resid = t - matmul(h, beta)
    beta_new = beta + matmul(matmul(m_new, h.T), resid)
    return m_new, beta_new, 0
