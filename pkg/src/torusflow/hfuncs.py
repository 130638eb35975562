"""Energy densities h(Q) with their derivatives.

Admissible means: h >= 0, monotone increasing, convex, bounded second
derivative and h'(1) - h(1) >= 0 on [1, inf). The three shipped shapes are
the quadratic used for the Dirichlet energy, the linear one for the area,
and the C^1 plateau ramp used by the gradient maximum principle:

    h_M(x) = 0                       x <= M
           = a (x - M)^2             M < x < M + 1
           = a (2x - 2M - 1)         x >= M + 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ArrayLike = float | np.ndarray


@dataclass(frozen=True)
class HFunction:
    name: str
    h: Callable[[ArrayLike], ArrayLike]
    dh: Callable[[ArrayLike], ArrayLike]
    d2h: Callable[[ArrayLike], ArrayLike]
    params: dict = field(default_factory=dict)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.h(x)


def h_area(scale: float = 1.0) -> HFunction:
    """h(x) = scale x; h'(1) - h(1) = 0."""
    return HFunction(
        "area",
        h=lambda x: scale * np.asarray(x, dtype=np.float64),
        dh=lambda x: scale * np.ones_like(np.asarray(x, dtype=np.float64)),
        d2h=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)),
        params={"scale": scale},
    )


def h_quadratic(scale: float = 1.0) -> HFunction:
    """h(x) = scale x^2; tracks the Dirichlet energy since x^2 = 1 + |p|^2."""
    return HFunction(
        "dirichlet",
        h=lambda x: scale * np.square(np.asarray(x, dtype=np.float64)),
        dh=lambda x: 2.0 * scale * np.asarray(x, dtype=np.float64),
        d2h=lambda x: np.full_like(np.asarray(x, dtype=np.float64), 2.0 * scale),
        params={"scale": scale},
    )


def h_M_eval(x: ArrayLike, M: float, alpha_eps: float) -> ArrayLike:
    """Plateau ramp value; C^1 at both knots (x = M and x = M + 1)."""
    x = np.asarray(x, dtype=np.float64)
    ramp = alpha_eps * (x - M) ** 2
    linear = alpha_eps * (2.0 * x - 2.0 * M - 1.0)
    out = np.where(x <= M, 0.0, np.where(x < M + 1.0, ramp, linear))
    return float(out) if out.ndim == 0 else out


def h_plateau(M: float, alpha_eps: float) -> HFunction:
    """The h_M ramp as an HFunction; positive exactly above M."""
    if M < 1.0:
        raise ValueError("plateau level M must be >= 1 (Q never drops below 1)")

    def dh(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.where(
            x <= M, 0.0, np.where(x < M + 1.0, 2.0 * alpha_eps * (x - M), 2.0 * alpha_eps)
        )
        return float(out) if out.ndim == 0 else out

    def d2h(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.where(x <= M, 0.0, np.where(x < M + 1.0, 2.0 * alpha_eps, 0.0))
        return float(out) if out.ndim == 0 else out

    return HFunction(
        "h_M",
        h=lambda x: h_M_eval(x, M, alpha_eps),
        dh=dh,
        d2h=d2h,
        params={"M": M, "alpha_eps": alpha_eps},
    )


def make_h(name: str, scale: float = 1.0, M: float = 1.0) -> HFunction:
    """Factory keyed by the configuration names."""
    if name == "dirichlet":
        return h_quadratic(scale)
    if name == "area":
        return h_area(scale)
    if name == "h_M":
        return h_plateau(M, scale)
    raise ValueError(f"unknown h spec {name!r}; choose dirichlet, area or h_M")


def is_admissible(hf: HFunction, xs: np.ndarray | None = None, tol: float = 1e-12) -> bool:
    """Sampled admissibility check on [1, inf)."""
    if xs is None:
        xs = 1.0 + np.linspace(0.0, 9.0, 181) ** 2
    xs = np.asarray(xs, dtype=np.float64)
    if np.any(xs < 1.0):
        raise ValueError("admissibility is defined on [1, inf)")
    h1 = float(np.asarray(hf.h(1.0)))
    dh1 = float(np.asarray(hf.dh(1.0)))
    return bool(
        np.all(np.asarray(hf.h(xs)) >= -tol)
        and np.all(np.asarray(hf.dh(xs)) >= -tol)
        and np.all(np.asarray(hf.d2h(xs)) >= -tol)
        and dh1 - h1 >= -tol
    )
