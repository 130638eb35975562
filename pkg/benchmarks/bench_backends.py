"""Benchmark the compiled stencil kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_backends.py [--reps 2000]

Prints a per-operator table (both backends timed in-process) and an
end-to-end single-path timing for each backend (run in subprocesses, since
the backend binds at import time).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

import torusflow as tf
from torusflow import _stencils_np

try:
    from torusflow import _kernels
except ImportError:
    _kernels = None

END_TO_END = """
import time
import numpy as np
import torusflow as tf
from torusflow.diagnostics import EnergyObserver
from torusflow.hfuncs import make_h
from torusflow.noise import sample_path, n_steps

g = tf.GridSpec(1, 64)
w = tf.build_preset("constant", {"c": 0.0}, g)
dt = tf.cfl_dt(tf.SpdeParams(dt=1.0), w, g)
p = tf.SpdeParams(0.0, 0.0, 1.0, dt)
x = np.arange(64) / 64
u0 = tf.ScalarField(g, 0.2 * np.sin(2 * np.pi * x))
steps = n_steps(0.25, dt)
path = sample_path(steps * dt, dt, 1)
obs = EnergyObserver(w, p, 1.0, make_h("area", 1.0))
t0 = time.perf_counter()
tf.run_path(u0, 0.25, path, p, w, [obs])
print(f"{tf.backend} {time.perf_counter() - t0:.3f} {steps}")
"""


def time_fn(fn, reps):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def op_table(reps):
    rng = np.random.default_rng(0)
    rows = []
    for dim, N in ((1, 64), (2, 64)):
        g = tf.GridSpec(dim, N)
        w = tf.build_preset("cosine_well", {"c": 0.5}, g)
        u = rng.standard_normal(g.shape)
        V = rng.standard_normal((dim,) + g.shape)
        h = g.h
        invh2 = 1.0 / (h * h)
        cases = {
            "gradient_c": (
                lambda: _stencils_np.gradient_c(u, 0.5 / h),
                lambda: _kernels.gradient_c_1d(u, 0.5 / h)
                if dim == 1
                else _kernels.gradient_c_2d(u, 0.5 / h),
            ),
            "hessian": (
                lambda: _stencils_np.hessian(u, invh2, 0.25 * invh2),
                lambda: _kernels.hessian_1d(u, invh2, 0.25 * invh2)
                if dim == 1
                else _kernels.hessian_2d(u, invh2, 0.25 * invh2),
            ),
            "laplacian_f": (
                lambda: _stencils_np.laplacian_f(
                    u, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2
                ),
                lambda: _kernels.laplacian_f_1d(u, w.exp_neg_face, w.exp_pos_node, invh2)
                if dim == 1
                else _kernels.laplacian_f_2d(u, w.exp_neg_face, w.exp_pos_node, invh2),
            ),
            "div_f": (
                lambda: _stencils_np.div_f(V, w.grad_f, 0.5 / h),
                lambda: _kernels.div_f_1d(V, w.grad_f, 0.5 / h)
                if dim == 1
                else _kernels.div_f_2d(V, w.grad_f, 0.5 / h),
            ),
        }
        for name, (np_fn, cy_fn) in cases.items():
            t_np = time_fn(np_fn, reps)
            t_cy = time_fn(cy_fn, reps) if _kernels is not None else float("nan")
            rows.append((f"{name} {dim}d N={N}", t_np * 1e6, t_cy * 1e6))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=2000)
    args = parser.parse_args()

    print(f"active backend: {tf.backend}")
    if _kernels is None:
        print("compiled extension unavailable; numpy column only\n")

    rows = op_table(args.reps)
    print(f"\n{'operator':<24} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for name, t_np, t_cy in rows:
        ratio = t_np / t_cy if t_cy == t_cy else float("nan")
        print(f"{name:<24} {t_np:>10.2f} {t_cy:>10.2f} {ratio:>7.1f}x")

    print("\nend-to-end: one path, N=64, T=0.25, per-step energy reports")
    for backend in ("cython", "numpy"):
        if backend == "cython" and _kernels is None:
            continue
        env = dict(os.environ, TORUSFLOW_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True
        )
        if out.returncode != 0:
            print(f"  {backend}: failed ({out.stderr.strip().splitlines()[-1]})")
            continue
        name, seconds, steps = out.stdout.split()
        print(f"  {name:<8} {float(seconds):6.2f} s for {steps} steps")


if __name__ == "__main__":
    main()
