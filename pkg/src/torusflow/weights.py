"""Weight models: the function f behind d(mu) = e^{-f} dx, its derivatives,
the vertical-force constant xi, and the pinching check D^2 f >= delta xi Id.

Face samples of f are taken from the analytic callback at geometric face
midpoints (not averaged from nodes), which keeps the mimetic Laplacian
exactly adjoint to the staggered gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, ScalarField, VectorField, SymMatrixField
from ._fieldmath import sym_pairs, vec_dot

PRESETS = ("constant", "cosine_well", "quadratic_seam")


@dataclass(frozen=True)
class WeightModel:
    grid: GridSpec
    xi: float
    f_node: np.ndarray
    f_face: np.ndarray  # (dim, *shape), axis-a faces indexed by their left node
    grad_f: np.ndarray  # (dim, *shape), analytic samples
    hess_f: np.ndarray  # (m, *shape) symmetric storage, analytic samples
    metadata: dict = field(default_factory=dict)

    # caches consumed by the operator kernels
    exp_neg_node: np.ndarray = field(init=False)
    exp_pos_node: np.ndarray = field(init=False)
    exp_neg_face: np.ndarray = field(init=False)
    exp_neg_face_prev: np.ndarray = field(init=False)
    hess_f_is_zero: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        for name in ("f_node", "f_face", "grad_f", "hess_f"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite samples")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "exp_neg_node", np.exp(-self.f_node))
        object.__setattr__(self, "exp_pos_node", np.exp(self.f_node))
        wf = np.exp(-self.f_face)
        object.__setattr__(self, "exp_neg_face", np.ascontiguousarray(wf))
        prev = np.empty_like(wf)
        for a in range(self.grid.dim):
            prev[a] = np.roll(wf[a], 1, axis=a)
        object.__setattr__(self, "exp_neg_face_prev", prev)
        object.__setattr__(self, "hess_f_is_zero", not bool(self.hess_f.any()))

    @property
    def mu_volume(self) -> float:
        """Weighted volume of the torus, integral of 1 against d(mu)."""
        return float(np.sum(self.exp_neg_node)) * self.grid.cell_volume

    @property
    def f_node_field(self) -> ScalarField:
        return ScalarField(self.grid, self.f_node)

    @property
    def grad_f_field(self) -> VectorField:
        return VectorField(self.grid, self.grad_f)

    @property
    def hess_f_field(self) -> SymMatrixField:
        return SymMatrixField(self.grid, self.hess_f)

    def grad_f_sup(self) -> float:
        return float(np.sqrt(np.max(vec_dot(self.grad_f, self.grad_f))))


def from_callables(grid: GridSpec, f, grad, hess, xi: float, metadata: dict) -> WeightModel:
    """Sample analytic callbacks (each taking dim coordinate arrays) on the grid."""
    shape = grid.shape
    ones = np.ones(shape)
    f_node = np.asarray(f(*grid.node_mesh()), dtype=np.float64) * ones
    f_face = np.empty((grid.dim,) + shape)
    for a in range(grid.dim):
        f_face[a] = np.asarray(f(*grid.face_mesh(a)), dtype=np.float64) * ones
    g = grad(*grid.node_mesh())
    grad_f = np.empty((grid.dim,) + shape)
    for a in range(grid.dim):
        grad_f[a] = np.asarray(g[a], dtype=np.float64) * ones
    H = hess(*grid.node_mesh())
    pairs = sym_pairs(grid.dim)
    hess_f = np.empty((len(pairs),) + shape)
    for k, (a, b) in enumerate(pairs):
        hess_f[k] = np.asarray(H[a][b], dtype=np.float64) * ones
    return WeightModel(grid, float(xi), f_node, f_face, grad_f, hess_f, metadata)


def build_preset(name: str, params: dict, grid: GridSpec) -> WeightModel:
    """Build one of the shipped weights.

    constant        f = c            (the unweighted/MCF case for c = 0)
    cosine_well     f = c sum_i (1 - cos 2 pi x_i), periodic, indefinite Hessian
    quadratic_seam  f = c |x - x0|^2 on [0,1)^n; matches the convex example
                    but is not periodic, so its values jump across the seam
                    (flagged in metadata["periodic"])
    """
    c = float(params.get("c", 0.0))
    xi = float(params.get("xi", 0.0))
    if c < 0:
        raise ValueError("weight amplitude c must be non-negative")
    n = grid.dim

    if name == "constant":
        f = lambda *xs: c  # noqa: E731
        grad = lambda *xs: [0.0] * n  # noqa: E731
        hess = lambda *xs: [[0.0] * n for _ in range(n)]  # noqa: E731
        periodic = True
    elif name == "cosine_well":
        two_pi = 2.0 * np.pi

        def f(*xs):
            return c * sum(1.0 - np.cos(two_pi * x) for x in xs)

        def grad(*xs):
            return [c * two_pi * np.sin(two_pi * x) for x in xs]

        def hess(*xs):
            return [
                [c * two_pi**2 * np.cos(two_pi * xs[a]) if a == b else 0.0 for b in range(n)]
                for a in range(n)
            ]

        periodic = True
    elif name == "quadratic_seam":
        x0 = params.get("x0", (0.5,) * n)
        if np.isscalar(x0):
            x0 = (float(x0),) * n
        x0 = tuple(float(v) for v in x0)
        if len(x0) != n:
            raise ValueError(f"x0 must have {n} components")

        def f(*xs):
            return c * sum((x - x0[a]) ** 2 for a, x in enumerate(xs))

        def grad(*xs):
            return [2.0 * c * (x - x0[a]) for a, x in enumerate(xs)]

        def hess(*xs):
            return [[2.0 * c if a == b else 0.0 for b in range(n)] for a in range(n)]

        periodic = False
    else:
        raise ValueError(f"unknown weight preset {name!r}; choose from {PRESETS}")

    meta = {"name": name, "c": c, "xi": xi, "periodic": periodic}
    if name == "quadratic_seam":
        meta["x0"] = x0
    return from_callables(grid, f, grad, hess, xi, meta)


@dataclass(frozen=True)
class PinchingReport:
    """Grid minimum of the smallest eigenvalue of D^2 f - delta xi Id."""

    delta: float
    min_margin: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {"delta": self.delta, "min_margin": self.min_margin, "satisfied": self.satisfied}


def check_pinching(w: WeightModel, delta: float) -> PinchingReport:
    """Evaluate the pinching hypothesis D^2 f >= delta xi Id at every node.

    Smallest eigenvalues come from the analytic Hessian samples: closed
    forms for dim <= 2, a dense symmetric eigensolve for dim = 3.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    shift = delta * w.xi
    H = w.hess_f
    if w.grid.dim == 1:
        margin = H[0] - shift
    elif w.grid.dim == 2:
        a = H[0] - shift
        b = H[1]
        c = H[2] - shift
        margin = 0.5 * (a + c) - np.sqrt((0.5 * (a - c)) ** 2 + b * b)
    else:
        m = w.grid.cell_count
        mats = np.empty((m, 3, 3))
        flat = H.reshape(6, m)
        for k, (i, j) in enumerate(sym_pairs(3)):
            mats[:, i, j] = flat[k]
            mats[:, j, i] = flat[k]
        mats[:, 0, 0] -= shift
        mats[:, 1, 1] -= shift
        mats[:, 2, 2] -= shift
        margin = np.linalg.eigvalsh(mats)[:, 0]
    min_margin = float(np.min(margin))
    return PinchingReport(delta=float(delta), min_margin=min_margin, satisfied=min_margin >= 0.0)


def alpha_from_delta(delta: float) -> float:
    """Largest alpha with 4 alpha / (2 + 3 alpha) <= delta (met with equality).

    The admissible range is 0 < delta < 4/3; the formula has a pole at 4/3.
    """
    if not 0.0 < delta < 4.0 / 3.0:
        raise ValueError("delta must lie in (0, 4/3)")
    return 2.0 * delta / (4.0 - 3.0 * delta)
