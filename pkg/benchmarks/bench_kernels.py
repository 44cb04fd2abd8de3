"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the primitive kernels and two composed workloads (a weighted-form
evaluation and an RK4 Hamiltonian-flow step) on both backends and prints a
speedup table.  Usage:

    python3 benchmarks/bench_kernels.py [N ...]
"""

import sys
import time
import timeit

import numpy as np

from curveflow import _kernels_jit as jit
from curveflow import _kernels_np as ref


def bench(fn, *args, repeat=5, number=50):
    fn(*args)  # warm up / compile
    timer = timeit.Timer(lambda: fn(*args))
    return min(timer.repeat(repeat=repeat, number=number)) / number


def primitive_rows(n, rng):
    v = rng.standard_normal((n, 3))
    el = ref.edge_lengths(v)
    w = ref.vertex_weights(el)
    a = rng.standard_normal((n, 3))
    b = rng.standard_normal((n, 3))
    s = rng.random(n) + 0.5
    return [
        ("edge_lengths", (v,)),
        ("vertex_weights", (el,)),
        ("centered_diff", (a, w)),
        ("rows_dot", (a, b)),
        ("rows_cross", (a, b)),
        ("dot_sum", (a, b, s)),
        ("triple_sum", (v, a, b, s)),
        ("weighted_vec_sum", (a, s)),
    ]


def composed_form(kernels, v):
    el = kernels.edge_lengths(v)
    w = kernels.vertex_weights(el)
    a = kernels.centered_diff(v, w)
    b = kernels.centered_diff(a, w)
    k2 = kernels.rows_dot(b, b)
    th = kernels.triple_sum(a, v, a, (1.0 + k2) * w)
    om = kernels.triple_sum(a, v, b, w)
    return th + om


def rk4_binormal(kernels, v, dt, steps):
    for _ in range(steps):
        ks = []
        q = v
        for scale in (0.5 * dt, 0.5 * dt, dt, None):
            el = kernels.edge_lengths(q)
            w = kernels.vertex_weights(el)
            a = kernels.centered_diff(q, w)
            b = kernels.centered_diff(a, w)
            k = kernels.rows_cross(a, b)
            ks.append(k)
            if scale is not None:
                q = v + scale * k
        v = v + (dt / 6.0) * (ks[0] + 2.0 * ks[1] + 2.0 * ks[2] + ks[3])
    return v


def main():
    sizes = [int(s) for s in sys.argv[1:]] or [128, 256, 512, 2048]
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'N':>6}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for n in sizes:
        for name, args in primitive_rows(n, rng):
            t_np = bench(getattr(ref, name), *args)
            t_jit = bench(getattr(jit, name), *args)
            print(f"{name:<22}{n:>6}{t_np*1e6:>10.1f}us{t_jit*1e6:>10.1f}us{t_np/t_jit:>8.1f}x")
        theta_grid = 2.0 * np.pi * np.arange(n) / n
        v = np.stack([np.cos(theta_grid), np.sin(theta_grid), 0.1 * np.sin(2 * theta_grid)], axis=1)
        for name, fn, args in [
            ("form evaluation", composed_form, (v,)),
            ("rk4 x10 (binormal)", rk4_binormal, (v, 1e-4, 10)),
        ]:
            t_np = bench(fn, ref, *args, number=10)
            t_jit = bench(fn, jit, *args, number=10)
            print(f"{name:<22}{n:>6}{t_np*1e6:>10.1f}us{t_jit*1e6:>10.1f}us{t_np/t_jit:>8.1f}x")
        print()


if __name__ == "__main__":
    main()
