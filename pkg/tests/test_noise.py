"""Wiener path determinism, moments, and coarsening."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusflow.noise import WienerPath, coarsen, sample_path


def test_same_seed_bitwise_identical():
    a = sample_path(1.0, 1e-3, 42)
    b = sample_path(1.0, 1e-3, 42)
    np.testing.assert_array_equal(a.increments, b.increments)


def test_different_seeds_decorrelated():
    a = sample_path(10.0, 1e-3, 1)
    b = sample_path(10.0, 1e-3, 2)
    rho = np.corrcoef(a.increments, b.increments)[0, 1]
    assert abs(rho) < 0.05


def test_increment_variance_matches_dt():
    dt = 2e-3
    path = sample_path(200.0, dt, 7)  # 1e5 draws
    assert len(path) == 100_000
    var = path.increments.var()
    assert dt * 0.95 <= var <= dt * 1.05
    assert abs(path.increments.mean()) < 3 * np.sqrt(dt / len(path))


def test_total_variance_across_seeds():
    T, dt = 1.0, 1.0 / 64
    totals = np.array([sample_path(T, dt, s).increments.sum() for s in range(10_000)])
    assert T * 0.95 <= totals.var() <= T * 1.05


def test_rejects_nonpositive_mesh():
    with pytest.raises(ValueError):
        sample_path(0.0, 1e-3, 0)
    with pytest.raises(ValueError):
        sample_path(1.0, -1e-3, 0)
    with pytest.raises(ValueError):
        WienerPath(dt=0.0, increments=np.zeros(4), seed=0)


def test_horizon_covers_requested_time():
    path = sample_path(0.25, 6.103515625e-05, 3)
    assert path.horizon >= 0.25 - 1e-12


# ----------------------------------------------------------------- coarsen --


def test_coarsen_identity_factor():
    path = sample_path(1.0, 1e-2, 11)
    assert coarsen(path, 1) is path


def test_coarsen_full_collapse_telescopes():
    path = sample_path(1.0, 1e-2, 11)
    whole = coarsen(path, len(path))
    assert len(whole) == 1
    assert whole.increments[0] == pytest.approx(path.increments.sum(), abs=1e-15)
    assert whole.dt == pytest.approx(path.horizon)


def test_coarsen_rejects_nondivisible_factor():
    path = sample_path(1.0, 1e-2, 11)
    with pytest.raises(ValueError):
        coarsen(path, 3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), factor=st.sampled_from([2, 4, 5, 10, 20]))
def test_coarsen_commutes_with_partial_sums(seed, factor):
    """Cumulative values at shared mesh points agree (exact telescoping in
    real arithmetic; accumulated round-off at the 1e-12 level here)."""
    path = sample_path(1.0, 1e-2, seed)  # 100 increments
    coarse = coarsen(path, factor)
    fine_cum = path.cumulative()[::factor]
    coarse_cum = coarse.cumulative()
    np.testing.assert_allclose(coarse_cum, fine_cum, rtol=0, atol=1e-12)


def test_coarsened_increment_variance():
    dt, factor = 1e-3, 8
    path = sample_path(80.0, dt, 13)
    coarse = coarsen(path, factor)
    var = coarse.increments.var()
    assert factor * dt * 0.95 <= var <= factor * dt * 1.05
