"""Discrete calculus on uniform periodic grids over the flat torus T^n.

Fields are node-collocated samples. The weighted Laplacian is assembled in
flux (staggered) form with face weights e^{-f} taken at geometric face
midpoints, which makes the discrete integration-by-parts identity

    h^n sum_j sum_a (D+u)_a (D+v)_a e^{-f_face}  =  - integrate_mu(v * laplacian_f(u))

exact up to round-off for every weight. All reductions go through
``np.sum``, which uses pairwise (tree) summation for float64.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import _backend
from ._fieldmath import sym_matvec, quad_form, frob_sq, vec_dot

if TYPE_CHECKING:
    from .weights import WeightModel


@dataclass(frozen=True)
class GridSpec:
    """Uniform N^dim grid on [0,1)^dim with periodic wrap.

    The spacing is represented exactly by the integer N (h = 1/N is exact
    in binary for the power-of-two N used throughout the test suite).
    """

    dim: int
    points_per_axis: int

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= 3:
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.points_per_axis < 4:
            raise ValueError("stencils need three distinct neighbours: N >= 4")

    @property
    def h(self) -> float:
        return 1.0 / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def cell_count(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def node_mesh(self) -> list[np.ndarray]:
        """Node coordinates as dim broadcastable meshgrid arrays."""
        x = np.arange(self.points_per_axis) * self.h
        return list(np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True))

    def face_mesh(self, axis: int) -> list[np.ndarray]:
        """Coordinates of face midpoints (j, j + e_axis), indexed by j."""
        mesh = self.node_mesh()
        mesh[axis] = mesh[axis] + 0.5 * self.h
        return mesh


def _prep(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"expected field shape {shape}, got {arr.shape}")
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Real sample per node; values are treated as immutable once wrapped."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _prep(self.values, self.grid.shape))

    @classmethod
    def full(cls, grid: GridSpec, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class VectorField:
    """dim real components per node, stacked along the leading axis."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _prep(self.values, (self.grid.dim,) + self.grid.shape))

    def dot(self, other: "VectorField") -> ScalarField:
        return ScalarField(self.grid, vec_dot(self.values, other.values))

    def norm_sq(self) -> ScalarField:
        return ScalarField(self.grid, vec_dot(self.values, self.values))

    def sup_norm(self) -> float:
        return float(np.sqrt(np.max(vec_dot(self.values, self.values))))


@dataclass(frozen=True)
class SymMatrixField:
    """Symmetric matrix per node, stored as the dim(dim+1)/2 upper triangle."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        m = self.grid.dim * (self.grid.dim + 1) // 2
        object.__setattr__(self, "values", _prep(self.values, (m,) + self.grid.shape))

    def matvec(self, V: VectorField) -> VectorField:
        return VectorField(self.grid, sym_matvec(self.values, V.values))

    def quad(self, V: VectorField) -> ScalarField:
        return ScalarField(self.grid, quad_form(self.values, V.values))

    def frobenius_sq(self) -> ScalarField:
        return ScalarField(self.grid, frob_sq(self.values, self.grid.dim))


def _same_grid(a, b) -> GridSpec:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return a.grid


def gradient_c(u: ScalarField) -> VectorField:
    """Second-order central gradient with periodic wrap."""
    g = u.grid
    return VectorField(g, _backend.gradient_c(u.values, 0.5 / g.h))


def gradient_f(u: ScalarField) -> VectorField:
    """Forward (staggered) gradient; component a lives on the face (j, j+e_a)."""
    g = u.grid
    return VectorField(g, _backend.gradient_f(u.values, 1.0 / g.h))


def hessian(u: ScalarField) -> SymMatrixField:
    """Central second differences; mixed entries from the 4-point cross stencil."""
    g = u.grid
    invh2 = 1.0 / (g.h * g.h)
    return SymMatrixField(g, _backend.hessian(u.values, invh2, 0.25 * invh2))


def integrate_mu(g: ScalarField, w: "WeightModel") -> float:
    """Trapezoid-on-torus integral of g against d(mu) = e^{-f} dx."""
    grid = _same_grid(g, w)
    return float(np.sum(g.values * w.exp_neg_node)) * grid.cell_volume


def div_f(V: VectorField, w: "WeightModel") -> ScalarField:
    """Collocated weighted divergence div V - grad f . V (central differences)."""
    grid = _same_grid(V, w)
    return ScalarField(grid, _backend.div_f(V.values, w.grad_f, 0.5 / grid.h))


def laplacian_f(u: ScalarField, w: "WeightModel") -> ScalarField:
    """Mimetic weighted Laplacian e^{f} D-( e^{-f_face} D+ u ) / h^2."""
    grid = _same_grid(u, w)
    invh2 = 1.0 / (grid.h * grid.h)
    return ScalarField(
        grid,
        _backend.laplacian_f(u.values, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2),
    )


def staggered_inner(u: ScalarField, v: ScalarField, w: "WeightModel") -> float:
    """Weighted inner product of forward gradients, h^n sum D+u . D+v e^{-f_face}.

    This is the exact discrete adjoint pairing of ``laplacian_f``: it equals
    ``-integrate_mu(v * laplacian_f(u))`` to round-off. With u = v it is the
    staggered Dirichlet energy.
    """
    grid = _same_grid(u, w)
    invh = 1.0 / grid.h
    du = _backend.gradient_f(u.values, invh)
    dv = du if v is u else _backend.gradient_f(v.values, invh)
    return float(np.sum(du * dv * w.exp_neg_face)) * grid.cell_volume
