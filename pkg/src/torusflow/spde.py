"""Drift and noise coefficients of the graph flow SPDE, time stepping, and
single-path evolution.

The flow solved here, in Stratonovich form, is

    du = (eps Lap_f u + Q div_f v + xi u) dt + lam Q o dW,

with Q = sqrt(1 + |grad u|^2) and v = grad u / Q. The nonlinearity
Q div_f v is always evaluated through the algebraic identity

    Q div_f v = Lap_f u - v . D^2u v,

which reuses the adjoint-exact mimetic Laplacian instead of differentiating
a quotient. The Ito drift adds the correction (lam^2 / 2) v . D^2u v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from . import _backend
from ._fieldmath import area_q, quad_form
from .grid import GridSpec, ScalarField, VectorField
from .noise import WienerPath, n_steps
from .weights import WeightModel

SCHEMES = ("explicit_em", "heun_stratonovich")


class BlowupDetected(RuntimeError):
    """Raised when the explicit scheme leaves the trusted region."""

    def __init__(self, t: float, sup: float):
        super().__init__(f"blow-up at t={t:g} (sup |u| = {sup:g})")
        self.t = t
        self.sup = sup


@dataclass(frozen=True)
class SpdeParams:
    epsilon: float = 0.0
    xi: float = 0.0
    lam: float = 1.0
    dt: float = 1e-4
    scheme: str = "explicit_em"
    blowup_threshold: float = 1e6

    def __post_init__(self) -> None:
        if self.epsilon < 0 or self.xi < 0 or self.lam < 0:
            raise ValueError("epsilon, xi and lam must be non-negative")
        if self.lam * self.lam >= 2.0:
            raise ValueError(f"noise intensity violates lam^2 < 2: lam = {self.lam}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


@dataclass(frozen=True)
class State:
    t: float
    u: ScalarField


def area_element(grad_u: VectorField) -> ScalarField:
    """Pointwise Q(p) = sqrt(1 + |p|^2) >= 1."""
    return ScalarField(grad_u.grid, area_q(grad_u.values))


def tilt(grad_u: VectorField) -> VectorField:
    """Pointwise v(p) = p / sqrt(1 + |p|^2); |v| < 1 everywhere."""
    g = grad_u.values
    return VectorField(grad_u.grid, g / area_q(g))


def _drift_parts(
    u: np.ndarray, p: SpdeParams, w: WeightModel
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stratonovich drift, pointwise v.D^2u v, and Q, sharing the stencils."""
    grid = w.grid
    h = grid.h
    invh2 = 1.0 / (h * h)
    lap = _backend.laplacian_f(u, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2)
    G = _backend.gradient_c(u, 0.5 / h)
    H = _backend.hessian(u, invh2, 0.25 * invh2)
    q = area_q(G)
    vhv = quad_form(H, G / q)
    strat = ((lap - vhv) + p.epsilon * lap) + p.xi * u
    return strat, vhv, q


def correction_term(u: ScalarField) -> ScalarField:
    """Unit-intensity Stratonovich-to-Ito correction (1/2) v . D^2u v.

    The drift correction for noise intensity lam is lam^2 times this.
    """
    h = u.grid.h
    invh2 = 1.0 / (h * h)
    G = _backend.gradient_c(u.values, 0.5 / h)
    H = _backend.hessian(u.values, invh2, 0.25 * invh2)
    return ScalarField(u.grid, 0.5 * quad_form(H, G / area_q(G)))


def strat_drift(u: ScalarField, p: SpdeParams, w: WeightModel) -> ScalarField:
    """Stratonovich drift (1+eps) Lap_f u - v.D^2u v + xi u."""
    out, _, _ = _drift_parts(u.values, p, w)
    if not np.all(np.isfinite(out)):
        raise BlowupDetected(math.nan, u.sup_norm())
    return ScalarField(u.grid, out)


def ito_drift(u: ScalarField, p: SpdeParams, w: WeightModel) -> ScalarField:
    """Ito drift: the Stratonovich drift plus lam^2 x correction_term.

    Built literally as that sum, so strat_drift + correction_term == ito_drift
    bit for bit when lam = 1.
    """
    strat, vhv, _ = _drift_parts(u.values, p, w)
    out = strat + (p.lam * p.lam) * (0.5 * vhv)
    if not np.all(np.isfinite(out)):
        raise BlowupDetected(math.nan, u.sup_norm())
    return ScalarField(u.grid, out)


def noise_coeff(u: ScalarField, p: SpdeParams) -> ScalarField:
    """Noise coefficient lam Q(grad u), at least lam everywhere."""
    G = _backend.gradient_c(u.values, 0.5 / u.grid.h)
    return ScalarField(u.grid, p.lam * area_q(G))


def cfl_dt(p: SpdeParams, w: WeightModel, g: GridSpec, c_safe: float = 0.5) -> float:
    """Stability heuristic for the explicit schemes.

    dt = c_safe h^2 / (2 n (1 + eps) + h max|grad f| + h^2 xi); the leading
    term is the parabolic limit of the (1+eps)-weighted Laplacian, the rest
    damps drift transport and the vertical force.
    """
    h = g.h
    denom = 2.0 * g.dim * (1.0 + p.epsilon) + h * w.grad_f_sup() + h * h * p.xi
    return c_safe * h * h / denom


def _check_state(u: np.ndarray, t: float, threshold: float) -> None:
    sup = float(np.max(np.abs(u)))
    if not math.isfinite(sup) or sup > threshold:
        raise BlowupDetected(t, sup)


def _step_raw(u: np.ndarray, dW: float, p: SpdeParams, w: WeightModel, t_next: float) -> np.ndarray:
    # overflow on a diverging path is expected: the state check below turns
    # it into BlowupDetected, so the intermediate warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        if p.scheme == "explicit_em":
            strat, vhv, q = _drift_parts(u, p, w)
            a = strat + (p.lam * p.lam) * (0.5 * vhv)
            new = (u + p.dt * a) + dW * (p.lam * q)
        else:
            a0, _, q0 = _drift_parts(u, p, w)
            pred = (u + p.dt * a0) + dW * (p.lam * q0)
            a1, _, q1 = _drift_parts(pred, p, w)
            new = u + 0.5 * (p.dt * (a0 + a1) + dW * (p.lam * q0 + p.lam * q1))
    _check_state(new, t_next, p.blowup_threshold)
    return new


def step(state: State, dW: float, p: SpdeParams, w: WeightModel) -> State:
    """One explicit Euler-Maruyama (Ito) or Heun (Stratonovich) step."""
    if not math.isfinite(dW):
        raise ValueError("dW must be finite")
    t_next = state.t + p.dt
    new = _step_raw(state.u.values, dW, p, w, t_next)
    return State(t=t_next, u=ScalarField(state.u.grid, new))


class Observer(Protocol):
    """Per-path diagnostic hook; called with step index 0 for the initial state."""

    def on_state(self, k: int, t: float, u: np.ndarray) -> None: ...


@dataclass
class Trajectory:
    final: State
    steps_done: int
    blown_up: bool = False
    blowup_time: float | None = None


def run_path(
    u0: ScalarField,
    T: float,
    path: WienerPath,
    p: SpdeParams,
    w: WeightModel,
    observers: Iterable[Observer] = (),
) -> Trajectory:
    """Iterate `step` along a Wiener path up to horizon T.

    The path mesh must match p.dt and cover T. On blow-up the trajectory is
    truncated at the offending step and flagged rather than propagated.
    """
    if u0.grid != w.grid:
        raise ValueError("initial data and weight live on different grids")
    if abs(path.dt - p.dt) > 1e-12 * p.dt:
        raise ValueError(f"path mesh dt={path.dt} does not match params dt={p.dt}")
    steps = 0 if T == 0 else n_steps(T, p.dt)
    if len(path) < steps:
        raise ValueError(f"path holds {len(path)} increments, need {steps}")

    observers = tuple(observers)
    u = u0.values.copy()
    for ob in observers:
        ob.on_state(0, 0.0, u)
    t = 0.0
    for k in range(steps):
        t_next = (k + 1) * p.dt
        try:
            u = _step_raw(u, float(path.increments[k]), p, w, t_next)
        except BlowupDetected as exc:
            return Trajectory(
                final=State(t=t, u=ScalarField(u0.grid, u)),
                steps_done=k,
                blown_up=True,
                blowup_time=exc.t,
            )
        t = t_next
        for ob in observers:
            ob.on_state(k + 1, t, u)
    return Trajectory(final=State(t=t, u=ScalarField(u0.grid, u)), steps_done=steps)
