"""Pure-numpy reference implementations of the hot array kernels.

Every function here has a numba twin in ``_kernels_jit``; the active set is
chosen once at import time by ``_backend``.  All inputs are contiguous
float64 arrays, index arithmetic is cyclic (closed polygons).
"""

import numpy as np

BACKEND = "numpy"


def edge_lengths(v):
    """|v[i+1] - v[i]| for a closed polygon (index mod N)."""
    return np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)


def vertex_weights(el):
    """Dual vertex weights (el[i-1] + el[i]) / 2; they sum to the total length."""
    return 0.5 * (np.roll(el, 1) + el)


def centered_diff(f, w):
    """(f[i+1] - f[i-1]) / (2 w[i]) for an (N, 3) field."""
    return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2.0 * w)[:, None]


def centered_diff_scalar(f, w):
    """(f[i+1] - f[i-1]) / (2 w[i]) for an (N,) scalar sequence."""
    return (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * w)


def rows_dot(a, b):
    """Per-row dot products of two (N, 3) arrays."""
    return np.einsum("ij,ij->i", a, b)


def rows_cross(a, b):
    """Per-row cross products of two (N, 3) arrays."""
    return np.cross(a, b)


def dot_sum(a, b, s):
    """sum_i s[i] * <a[i], b[i]>."""
    return float(np.einsum("i,ij,ij->", s, a, b))


def triple_sum(a, b, d, s):
    """sum_i s[i] * <a[i], b[i] x d[i]>.

    Computed via cross(b, d) so that swapping b and d negates the result
    exactly in IEEE arithmetic.
    """
    return float(np.einsum("i,ij,ij->", s, a, np.cross(b, d)))


def weighted_vec_sum(a, s):
    """sum_i s[i] * a[i] as a length-3 vector."""
    return np.einsum("i,ij->j", s, a)
