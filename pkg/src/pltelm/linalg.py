"""Dense linear algebra used by the ELM, OS-ELM and progressive learners.

A "matrix" here is a 2-D, C-contiguous ``float64`` numpy array. Products and
inversions go through :mod:`pltelm.kernels` so that the numba and numpy
backends stay interchangeable. Inversion is Gauss-Jordan with partial
pivoting; the pseudo-inverse uses the normal equations, not an SVD.
"""

import numpy as np

from . import kernels
from .errors import DimensionError, NonFiniteError, SingularError

PIVOT_TOL = 1e-12


def as_matrix(data, name="matrix"):
    """Coerce ``data`` to a finite 2-D float64 array (1-D input becomes a row)."""
    a = np.ascontiguousarray(data, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return a


def _shape(a):
    return f"{a.shape[0]}x{a.shape[1]}"


def matmul(a, b):
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {_shape(a)} by {_shape(b)}")
    return kernels.matmul(a, b)


def transpose(a):
    return np.ascontiguousarray(as_matrix(a).T)


def identity(n):
    return rect_identity(n, n)


def rect_identity(rows, cols):
    """Ones on the main diagonal; right-multiplying pads with zero columns."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"dimensions must be positive, got {rows}x{cols}")
    if cols < rows:
        raise DimensionError(f"rectangular identity needs cols >= rows, got {rows}x{cols}")
    return np.eye(rows, cols)


def ones(rows, cols):
    if rows < 1 or cols < 1:
        raise DimensionError(f"dimensions must be positive, got {rows}x{cols}")
    return np.ones((rows, cols))


def zeros(rows, cols):
    if rows < 1 or cols < 1:
        raise DimensionError(f"dimensions must be positive, got {rows}x{cols}")
    return np.zeros((rows, cols))


def invert(a):
    """Inverse of a square matrix.

    Raises SingularError when a pivot magnitude drops below ``PIVOT_TOL``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"cannot invert non-square {_shape(a)} matrix")
    inv, status = kernels.gauss_jordan_inverse(a, PIVOT_TOL)
    if status:
        raise SingularError(f"{_shape(a)} matrix is singular to working precision")
    if not np.isfinite(inv).all():
        raise NonFiniteError("inverse overflowed")
    return inv


def pseudo_inverse(h):
    """Left pseudo-inverse ``(H^T H)^-1 H^T`` of a full-column-rank matrix."""
    h = as_matrix(h)
    if h.shape[0] < h.shape[1]:
        raise SingularError(
            f"{_shape(h)} matrix has fewer rows than columns; H^T H is rank deficient"
        )
    ht = transpose(h)
    return matmul(invert(matmul(ht, h)), ht)
