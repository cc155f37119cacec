"""numba-compiled kernels mirroring ``_numpy`` loop for loop."""

import numpy as np
from numba import njit

SIGMOID, SINE, HARDLIMIT = 0, 1, 2


@njit(cache=True)
def matmul(a, b):
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for k in range(inner):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


@njit(cache=True)
def gauss_jordan_inverse(a, tol):
    n = a.shape[0]
    work = a.copy()
    inv = np.eye(n)
    for col in range(n):
        pivot = col
        best = abs(work[col, col])
        for r in range(col + 1, n):
            v = abs(work[r, col])
            if v > best:
                best = v
                pivot = r
        if best < tol:
            return inv, 1
        if pivot != col:
            for c in range(n):
                tmp = work[col, c]
                work[col, c] = work[pivot, c]
                work[pivot, c] = tmp
                tmp = inv[col, c]
                inv[col, c] = inv[pivot, c]
                inv[pivot, c] = tmp
        p = work[col, col]
        for c in range(n):
            work[col, c] /= p
            inv[col, c] /= p
        for r in range(n):
            if r == col:
                continue
            f = work[r, col]
            if f == 0.0:
                continue
            for c in range(n):
                work[r, c] -= f * work[col, c]
                inv[r, c] -= f * inv[col, c]
    return inv, 0


@njit(cache=True)
def hidden_layer(x, weights, biases, kind):
    n_rows, n_in = x.shape
    n_hidden = weights.shape[0]
    out = np.empty((n_rows, n_hidden))
    for i in range(n_rows):
        for j in range(n_hidden):
            acc = 0.0
            for k in range(n_in):
                acc += x[i, k] * weights[j, k]
            z = acc + biases[j]
            if kind == SIGMOID:
                out[i, j] = 1.0 / (1.0 + np.exp(-z))
            elif kind == SINE:
                out[i, j] = np.sin(z)
            else:
                out[i, j] = 1.0 if z >= 0.0 else 0.0
    return out


@njit(cache=True)
def rls_step(m, beta, h, t, tol):
    mht = matmul(m, h.T)
    s = np.eye(h.shape[0]) + matmul(h, mht)
    s_inv, status = gauss_jordan_inverse(s, tol)
    if status:
        return m, beta, status
    m_new = m - matmul(matmul(mht, s_inv), mht.T)
    resid = t - matmul(h, beta)
    beta_new = beta + matmul(matmul(m_new, h.T), resid)
    return m_new, beta_new, 0
