"""Seeded scalar Brownian increments on a fixed time mesh.

Sampling is counter-based (Philox keyed by the seed) through a fixed
inverse-CDF map, so a (T, dt, seed) triple reproduces its increments bit
for bit on any platform and in any evaluation order. Per-path seeds in
ensembles are derived as base_seed XOR path_index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri


@dataclass(frozen=True)
class WienerPath:
    """Increments W(t_{k+1}) - W(t_k) ~ N(0, dt) on a uniform mesh."""

    dt: float
    increments: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(
            self, "increments", np.ascontiguousarray(self.increments, dtype=np.float64)
        )

    def __len__(self) -> int:
        return self.increments.shape[0]

    @property
    def horizon(self) -> float:
        return self.dt * len(self)

    def cumulative(self) -> np.ndarray:
        """Path values W(t_k) at mesh points, including W(0) = 0."""
        out = np.empty(len(self) + 1)
        out[0] = 0.0
        np.cumsum(self.increments, out=out[1:])
        return out


def n_steps(T: float, dt: float) -> int:
    """Number of mesh cells covering [0, T]; tolerant of T/dt landing on an integer."""
    return max(1, int(math.ceil(T / dt - 1e-9)))


def sample_path(T: float, dt: float, seed: int) -> WienerPath:
    """Draw ceil(T/dt) independent N(0, dt) increments keyed by seed.

    Uniforms are taken as (k + 1/2) / 2^53 from the Philox counter stream,
    strictly inside (0, 1), then mapped through the inverse normal CDF.
    """
    if T <= 0:
        raise ValueError("horizon T must be positive")
    if dt <= 0:
        raise ValueError("dt must be positive")
    count = n_steps(T, dt)
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    k = gen.integers(0, 1 << 53, size=count, dtype=np.uint64)
    uniforms = (k.astype(np.float64) + 0.5) * 2.0**-53
    z = ndtri(uniforms)
    return WienerPath(dt=dt, increments=z * math.sqrt(dt), seed=int(seed))


def coarsen(path: WienerPath, factor: int) -> WienerPath:
    """Sum consecutive blocks of increments: the same Brownian path on a mesh
    coarser by `factor`. Cumulative values at shared mesh points are identical
    by construction."""
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    if len(path) % factor != 0:
        raise ValueError(f"factor {factor} does not divide path length {len(path)}")
    if factor == 1:
        return path
    blocks = path.increments.reshape(-1, factor)
    return WienerPath(dt=path.dt * factor, increments=blocks.sum(axis=1), seed=path.seed)
