"""Initial-data presets for the experiments."""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, ScalarField, gradient_c

PRESETS = ("flat", "sine", "random_fourier")


def flat(grid: GridSpec, value: float = 0.0) -> ScalarField:
    return ScalarField.full(grid, value)


def sine(grid: GridSpec, amplitude: float) -> ScalarField:
    """amplitude * prod_i sin(2 pi x_i)."""
    mesh = grid.node_mesh()
    vals = np.full(grid.shape, amplitude)
    for x in mesh:
        vals = vals * np.sin(2.0 * np.pi * x)
    return ScalarField(grid, vals)


def random_fourier(grid: GridSpec, modes: int, seed: int) -> ScalarField:
    """Random trigonometric polynomial with modes up to `modes` per axis and
    coefficients damped by 1/(1 + |k|^2). Rescale afterwards to set a
    gradient bound."""
    if modes < 1:
        raise ValueError("modes must be >= 1")
    rng = np.random.default_rng(seed)
    mesh = grid.node_mesh()
    vals = np.zeros(grid.shape)
    ranges = [range(-modes, modes + 1)] * grid.dim
    for k in np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, grid.dim):
        if not np.any(k):
            continue
        phase = np.zeros(grid.shape)
        for a, x in enumerate(mesh):
            phase = phase + 2.0 * np.pi * k[a] * x
        damp = 1.0 / (1.0 + float(k @ k))
        a_k, b_k = rng.normal(size=2) * damp
        vals = vals + a_k * np.cos(phase) + b_k * np.sin(phase)
    return ScalarField(grid, vals)


def rescale_to_lipschitz(u: ScalarField, L: float) -> ScalarField:
    """Scale so the discrete (central) gradient sup equals L."""
    s = gradient_c(u).sup_norm()
    if s == 0.0:
        raise ValueError("cannot rescale a flat field to a gradient bound")
    return ScalarField(u.grid, u.values * (L / s))


def build_initial(
    name: str, grid: GridSpec, amplitude: float, lipschitz_L: float, modes: int, seed: int
) -> ScalarField:
    if name == "flat":
        u = flat(grid, amplitude)
    elif name == "sine":
        u = sine(grid, amplitude)
    elif name == "random_fourier":
        if lipschitz_L <= 0:
            raise ValueError("random_fourier requires lipschitz_L > 0")
        u = random_fourier(grid, modes, seed)
    else:
        raise ValueError(f"unknown initial preset {name!r}; choose from {PRESETS}")
    if lipschitz_L > 0 and name != "flat":
        u = rescale_to_lipschitz(u, lipschitz_L)
    return u
