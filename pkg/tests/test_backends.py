"""The compiled kernels and the numpy fallback must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

import torusflow as tf
from torusflow import _backend, _stencils_np

cython_kernels = pytest.importorskip(
    "torusflow._kernels", reason="compiled extension not built"
)


def random_weight(g, seed):
    rng = np.random.default_rng(seed)
    x = np.arange(g.points_per_axis) * g.h
    c = float(rng.uniform(0.2, 1.5))
    return tf.build_preset("cosine_well", {"c": c}, g)


@pytest.mark.parametrize("dim,N", [(1, 64), (1, 37), (2, 16), (2, 24)])
def test_stencil_ops_bitwise_equal(dim, N):
    g = tf.GridSpec(dim, N)
    rng = np.random.default_rng(dim * 100 + N)
    u = rng.standard_normal(g.shape)
    w = random_weight(g, N)
    h = g.h
    invh2 = 1.0 / (h * h)

    pairs = [
        (
            _stencils_np.gradient_c(u, 0.5 / h),
            _backend.gradient_c(u, 0.5 / h),
        ),
        (
            _stencils_np.gradient_f(u, 1.0 / h),
            _backend.gradient_f(u, 1.0 / h),
        ),
        (
            _stencils_np.hessian(u, invh2, 0.25 * invh2),
            _backend.hessian(u, invh2, 0.25 * invh2),
        ),
        (
            _stencils_np.laplacian_f(u, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2),
            _backend.laplacian_f(u, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2),
        ),
    ]
    V = rng.standard_normal((dim,) + g.shape)
    pairs.append(
        (
            _stencils_np.div_f(V, w.grad_f, 0.5 / h),
            _backend.div_f(V, w.grad_f, 0.5 / h),
        )
    )
    for ref, got in pairs:
        np.testing.assert_array_equal(np.asarray(got), ref)


def test_3d_routes_to_numpy():
    g = tf.GridSpec(3, 8)
    rng = np.random.default_rng(9)
    u = rng.standard_normal(g.shape)
    out = _backend.gradient_c(u, 4.0)
    np.testing.assert_array_equal(out, _stencils_np.gradient_c(u, 4.0))


TRAJ_SNIPPET = """
import numpy as np
import torusflow as tf
from torusflow.noise import sample_path

g = tf.GridSpec(1, 32)
w = tf.build_preset("cosine_well", {"c": 0.5}, g)
dt = tf.cfl_dt(tf.SpdeParams(dt=1.0), w, g)
p = tf.SpdeParams(0.05, 0.2, 1.0, dt)
x = np.arange(32) / 32
u0 = tf.ScalarField(g, 0.2 * np.sin(2 * np.pi * x))
path = sample_path(200 * dt, dt, 31337)
traj = tf.run_path(u0, 200 * dt, path, p, w)
print(tf.backend)
print(traj.final.u.values.tobytes().hex())
"""


def _run_with_backend(backend: str) -> tuple[str, str]:
    env = dict(os.environ, TORUSFLOW_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", TRAJ_SNIPPET], env=env, capture_output=True, text=True, check=True
    )
    name, payload = out.stdout.split()
    return name, payload


def test_full_trajectory_identical_across_backends():
    name_c, bytes_c = _run_with_backend("cython")
    name_n, bytes_n = _run_with_backend("numpy")
    assert name_c == "cython"
    assert name_n == "numpy"
    assert bytes_c == bytes_n


def test_backend_env_rejects_garbage():
    env = dict(os.environ, TORUSFLOW_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import torusflow"], env=env, capture_output=True, text=True
    )
    assert out.returncode != 0
    assert "TORUSFLOW_BACKEND" in out.stderr
