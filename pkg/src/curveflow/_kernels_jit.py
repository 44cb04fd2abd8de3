"""Numba-compiled array kernels; signature-compatible with ``_kernels_np``.

Single-pass fused loops beat the multi-temporary numpy pipelines at the
polygon sizes this package works with (N ~ 100..5000).  ``fastmath`` stays
off so reductions are IEEE-faithful and antisymmetry cancellations survive.
"""

import numpy as np
from numba import njit

BACKEND = "numba"

_jit = njit(cache=True, fastmath=False)


@_jit
def edge_lengths(v):
    n = v.shape[0]
    out = np.empty(n)
    for i in range(n):
        j = (i + 1) % n
        dx = v[j, 0] - v[i, 0]
        dy = v[j, 1] - v[i, 1]
        dz = v[j, 2] - v[i, 2]
        out[i] = np.sqrt(dx * dx + dy * dy + dz * dz)
    return out


@_jit
def vertex_weights(el):
    n = el.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = 0.5 * (el[i - 1] + el[i])
    return out


@_jit
def centered_diff(f, w):
    n = f.shape[0]
    out = np.empty((n, 3))
    for i in range(n):
        j = (i + 1) % n
        s = 1.0 / (2.0 * w[i])
        out[i, 0] = (f[j, 0] - f[i - 1, 0]) * s
        out[i, 1] = (f[j, 1] - f[i - 1, 1]) * s
        out[i, 2] = (f[j, 2] - f[i - 1, 2]) * s
    return out


@_jit
def centered_diff_scalar(f, w):
    n = f.shape[0]
    out = np.empty(n)
    for i in range(n):
        j = (i + 1) % n
        out[i] = (f[j] - f[i - 1]) / (2.0 * w[i])
    return out


@_jit
def rows_dot(a, b):
    n = a.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = a[i, 0] * b[i, 0] + a[i, 1] * b[i, 1] + a[i, 2] * b[i, 2]
    return out


@_jit
def rows_cross(a, b):
    n = a.shape[0]
    out = np.empty((n, 3))
    for i in range(n):
        out[i, 0] = a[i, 1] * b[i, 2] - a[i, 2] * b[i, 1]
        out[i, 1] = a[i, 2] * b[i, 0] - a[i, 0] * b[i, 2]
        out[i, 2] = a[i, 0] * b[i, 1] - a[i, 1] * b[i, 0]
    return out


@_jit
def dot_sum(a, b, s):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        acc += s[i] * (a[i, 0] * b[i, 0] + a[i, 1] * b[i, 1] + a[i, 2] * b[i, 2])
    return acc


@_jit
def triple_sum(a, b, d, s):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        cx = b[i, 1] * d[i, 2] - b[i, 2] * d[i, 1]
        cy = b[i, 2] * d[i, 0] - b[i, 0] * d[i, 2]
        cz = b[i, 0] * d[i, 1] - b[i, 1] * d[i, 0]
        acc += s[i] * (a[i, 0] * cx + a[i, 1] * cy + a[i, 2] * cz)
    return acc


@_jit
def weighted_vec_sum(a, s):
    n = a.shape[0]
    out = np.zeros(3)
    for i in range(n):
        out[0] += s[i] * a[i, 0]
        out[1] += s[i] * a[i, 1]
        out[2] += s[i] * a[i, 2]
    return out
