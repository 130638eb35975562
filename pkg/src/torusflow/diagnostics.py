"""Energy functionals along trajectories and the statistical verdicts that
check the dissipation inequalities at desk scale.

Per-sample quantities (one row per recorded time):

    dirichlet   integral |grad u|^2 dmu        (staggered, face-weighted)
    area        integral Q dmu                 (central Q, as in the drift)
    h_energy    integral h(Q) dmu for the configured h
    divf_term   integral Q^2 |div_f v|^2 dmu   (via Q div_f v = Lap_f u - v.D^2u v)
    hess_l2     integral |D^2 u|^2 dmu
    pinch_quad  integral grad u . ((1 + 3a/2) D^2 f - 2 a xi Id) grad u dmu
    mixed_term  integral (3/2 |D^2u|^2 - |D^2u v|^2 - 1/2 |v.D^2u v|^2) dmu
    grad_sup    sup |grad u| over nodes
    hess_v_l2   integral |D^2u v|^2 dmu        (lets the lam-weighted
    vhv_l2      integral |v.D^2u v|^2 dmu       dissipation form be recombined)

Statistical acceptance always separates Monte-Carlo error (k standard
errors) from discretization bias (an explicit O(dt + h^2) budget): the
continuum inequalities cannot hold to round-off for a discrete scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from ._fieldmath import area_q, frob_sq, quad_form, sym_matvec, vec_dot
from .grid import ScalarField, integrate_mu
from .hfuncs import HFunction, h_M_eval  # noqa: F401  (h_M_eval re-exported here)
from .spde import SpdeParams
from .weights import WeightModel

COLUMNS = (
    "t",
    "dirichlet",
    "area",
    "h_energy",
    "divf_term",
    "hess_l2",
    "pinch_quad",
    "mixed_term",
    "grad_sup",
    "hess_v_l2",
    "vhv_l2",
)


@dataclass(frozen=True)
class EnergyReport:
    t: float
    dirichlet: float
    area: float
    h_energy: float
    divf_term: float
    hess_l2: float
    pinch_quad: float
    mixed_term: float
    grad_sup: float
    hess_v_l2: float
    vhv_l2: float

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in COLUMNS)


def _energy_row(
    u: np.ndarray, w: WeightModel, p: SpdeParams, alpha: float, hf: HFunction
) -> tuple[float, ...]:
    grid = w.grid
    h = grid.h
    invh2 = 1.0 / (h * h)
    vol = grid.cell_volume
    wneg = w.exp_neg_node

    lap = _backend.laplacian_f(u, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2)
    G = _backend.gradient_c(u, 0.5 / h)
    H = _backend.hessian(u, invh2, 0.25 * invh2)
    Du = _backend.gradient_f(u, 1.0 / h)
    q = area_q(G)
    v = G / q
    Hv = sym_matvec(H, v)
    vhv = vec_dot(v, Hv)
    g2 = vec_dot(G, G)

    dirichlet = float(np.sum(Du * Du * w.exp_neg_face)) * vol
    area = float(np.sum(q * wneg)) * vol
    h_energy = float(np.sum(np.asarray(hf.h(q)) * wneg)) * vol
    qdiv = lap - vhv
    divf_term = float(np.sum(qdiv * qdiv * wneg)) * vol
    hess_l2 = float(np.sum(frob_sq(H, grid.dim) * wneg)) * vol
    hess_v_l2 = float(np.sum(vec_dot(Hv, Hv) * wneg)) * vol
    vhv_l2 = float(np.sum(vhv * vhv * wneg)) * vol
    mixed = 1.5 * hess_l2 - hess_v_l2 - 0.5 * vhv_l2
    if w.hess_f_is_zero:
        pinch = 0.0
    else:
        pinch = (1.0 + 1.5 * alpha) * float(np.sum(quad_form(w.hess_f, G) * wneg)) * vol
    if p.xi != 0.0:
        pinch = pinch - (2.0 * alpha * p.xi) * float(np.sum(g2 * wneg)) * vol
    grad_sup = math.sqrt(float(np.max(g2)))
    return (
        dirichlet,
        area,
        h_energy,
        divf_term,
        hess_l2,
        pinch,
        mixed,
        grad_sup,
        hess_v_l2,
        vhv_l2,
    )


def energy_report(
    u: ScalarField,
    w: WeightModel,
    p: SpdeParams,
    alpha: float,
    h_spec: HFunction,
    t: float = 0.0,
) -> EnergyReport:
    """All dissipation functionals of a single field."""
    if u.grid != w.grid:
        raise ValueError("field and weight live on different grids")
    return EnergyReport(t, *_energy_row(u.values, w, p, alpha, h_spec))


@dataclass
class EnergySeries:
    """Column store of reports along one path; rows in time order."""

    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.atleast_2d(np.asarray(self.data, dtype=np.float64))
        if self.data.shape[1] != len(COLUMNS):
            raise ValueError(f"expected {len(COLUMNS)} columns")

    def col(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    @property
    def times(self) -> np.ndarray:
        return self.data[:, 0]

    def __len__(self) -> int:
        return self.data.shape[0]

    def report(self, i: int) -> EnergyReport:
        return EnergyReport(*self.data[i])


class EnergyObserver:
    """Records an EnergyReport row every `stride` steps (always including
    the initial state)."""

    def __init__(
        self,
        w: WeightModel,
        p: SpdeParams,
        alpha: float,
        h_spec: HFunction,
        stride: int = 1,
    ):
        if stride < 1:
            raise ValueError("stride must be >= 1")
        self.w = w
        self.p = p
        self.alpha = alpha
        self.h_spec = h_spec
        self.stride = stride
        self._rows: list[tuple[float, ...]] = []

    def on_state(self, k: int, t: float, u: np.ndarray) -> None:
        if k % self.stride == 0:
            self._rows.append((t, *_energy_row(u, self.w, self.p, self.alpha, self.h_spec)))

    def series(self) -> EnergySeries:
        return EnergySeries(np.array(self._rows))


@dataclass(frozen=True)
class SupermartingaleVerdict:
    times: np.ndarray
    mean_energy: np.ndarray
    std_err: np.ndarray
    monotone_within: bool
    k: float
    bias: float
    worst_excess: float

    def to_dict(self) -> dict:
        return {
            "monotone_within": self.monotone_within,
            "k": self.k,
            "bias": self.bias,
            "worst_excess": self.worst_excess,
        }


def bias_budget(dt: float, h: float, scale: float = 1.0) -> float:
    """Declared discretization allowance O(dt + h^2) used by the verdicts."""
    return (dt + h * h) * scale


def _common_times(series_list: Sequence[EnergySeries]) -> np.ndarray:
    times = series_list[0].times
    for s in series_list[1:]:
        if len(s) != len(series_list[0]) or not np.array_equal(s.times, times):
            raise ValueError("ensemble series must share a common time mesh")
    return times


def supermartingale_test(
    series_list: Sequence[EnergySeries], k: float = 2.0, bias: float = 0.0
) -> SupermartingaleVerdict:
    """Check that the ensemble-mean Dirichlet energy never rises above its
    running minimum by more than k standard errors plus the bias budget."""
    if len(series_list) < 30:
        raise ValueError("supermartingale test needs at least 30 paths")
    times = _common_times(series_list)
    E = np.stack([s.col("dirichlet") for s in series_list])
    mean = E.mean(axis=0)
    se = E.std(axis=0, ddof=1) / math.sqrt(E.shape[0])
    running_min = np.minimum.accumulate(mean)
    excess = mean[1:] - running_min[:-1] - (k * se[1:] + bias)
    worst = float(np.max(excess)) if excess.size else -math.inf
    return SupermartingaleVerdict(
        times=times,
        mean_energy=mean,
        std_err=se,
        monotone_within=worst <= 0.0,
        k=k,
        bias=bias,
        worst_excess=worst,
    )


def dissipation_ledger_stats(
    series_list: Sequence[EnergySeries],
    p: SpdeParams,
    w: WeightModel,
    alpha: float,
    lambda_weighted: bool = False,
) -> tuple[float, float]:
    """Mean and standard error, over paths, of the ledger total

        |grad u(T)|^2 + int_0^T (2 eps hess_l2 + c_d divf_term + pinch_quad + mixed)
            - |grad u(0)|^2

    with the time integral taken by the trapezoid rule on the recorded mesh
    (left endpoints would overestimate the sharply decaying dissipation rate
    by dt rate(0) / 2, swamping the honest O(dt) scheme bias). With
    lambda_weighted the coefficients become c_d = 1 - lam^2/2 and
    mixed = (1 + lam^2/2) hess_l2 - lam^2 hess_v_l2 - (1 - lam^2/2) vhv_l2,
    which reduces to the plain form at lam = 1."""
    _common_times(series_list)
    lam2 = p.lam * p.lam if lambda_weighted else 1.0
    totals = []
    for s in series_list:
        times = s.times
        mixed = (
            (1.0 + 0.5 * lam2) * s.col("hess_l2")
            - lam2 * s.col("hess_v_l2")
            - (1.0 - 0.5 * lam2) * s.col("vhv_l2")
        )
        rate = (
            2.0 * p.epsilon * s.col("hess_l2")
            + (1.0 - 0.5 * lam2) * s.col("divf_term")
            + s.col("pinch_quad")
            + mixed
        )
        dirichlet = s.col("dirichlet")
        integral = float(np.trapezoid(rate, times)) if len(s) > 1 else 0.0
        totals.append(dirichlet[-1] - dirichlet[0] + integral)
    mean = float(np.mean(totals))
    if len(totals) > 1:
        err = float(np.std(totals, ddof=1) / math.sqrt(len(totals)))
    else:
        err = 0.0
    return mean, err


def dissipation_ledger(
    series_list: Sequence[EnergySeries],
    p: SpdeParams,
    w: WeightModel,
    alpha: float,
    lambda_weighted: bool = False,
) -> float:
    """Ledger mean alone; contract: <= k std errors + the declared bias budget."""
    return dissipation_ledger_stats(series_list, p, w, alpha, lambda_weighted)[0]


def empirical_lipschitz(series_list: Sequence[EnergySeries]) -> float:
    """Largest recorded sup-norm of the gradient across the whole ensemble."""
    return float(max(np.max(s.col("grad_sup")) for s in series_list))


def l_form_gap(series_list: Sequence[EnergySeries], L: float | None = None) -> tuple[float, float]:
    """The L-dependent dissipation form: ensemble mean of

        |grad u(T)|^2 + (3 + 4L^2)/(2 (1+L^2)^2) integral hess_l2 - |grad u(0)|^2

    using the run's empirical L when none is given. Returns (value, L)."""
    _common_times(series_list)
    if L is None:
        L = empirical_lipschitz(series_list)
    c = (3.0 + 4.0 * L * L) / (2.0 * (1.0 + L * L) ** 2)
    totals = []
    for s in series_list:
        dirichlet = s.col("dirichlet")
        integral = float(np.trapezoid(s.col("hess_l2"), s.times)) if len(s) > 1 else 0.0
        totals.append(dirichlet[-1] - dirichlet[0] + c * integral)
    return float(np.mean(totals)), float(L)


def max_principle_test(series: EnergySeries, L: float, slack: float = 0.05) -> bool:
    """True iff the recorded gradient sup never exceeds L (1 + slack)."""
    return bool(np.max(series.col("grad_sup")) <= L * (1.0 + slack))


def violation_fraction(
    series_list: Sequence[EnergySeries], L: float, slack: float = 0.05
) -> float:
    """Fraction of recorded samples (over all paths and times) violating the
    gradient bound L (1 + slack)."""
    total = 0
    bad = 0
    cap = L * (1.0 + slack)
    for s in series_list:
        g = s.col("grad_sup")
        total += g.size
        bad += int(np.sum(g > cap))
    return bad / total


def coercivity_check(u: ScalarField, p: SpdeParams, w: WeightModel) -> float:
    """Signed slack of the viscous operator's coercivity bound:

        rhs - lhs,  lhs = 2 <A_eps(grad u), grad u> + |B(grad u)|^2,
        rhs = -2 eps |grad u|^2_{H^1} + 2 (eps + xi) |grad u|^2_{L^2},

    with the duality pairing evaluated discretely as
    -int ((1+eps) Lap_f u - (1/2) v.D^2u v) Lap_f u dmu + xi int |grad u|^2 dmu.
    Non-negative up to O(h^2) stencil mismatch."""
    if u.grid != w.grid:
        raise ValueError("field and weight live on different grids")
    grid = u.grid
    h = grid.h
    invh2 = 1.0 / (h * h)
    vol = grid.cell_volume
    wneg = w.exp_neg_node
    arr = u.values

    lap = _backend.laplacian_f(arr, w.exp_neg_face, w.exp_neg_face_prev, w.exp_pos_node, invh2)
    G = _backend.gradient_c(arr, 0.5 / h)
    H = _backend.hessian(arr, invh2, 0.25 * invh2)
    q = area_q(G)
    v = G / q
    Hv = sym_matvec(H, v)
    vhv = vec_dot(v, Hv)

    i_pair = float(np.sum(((1.0 + p.epsilon) * lap - 0.5 * vhv) * lap * wneg)) * vol
    i_grad = float(np.sum(vec_dot(G, G) * wneg)) * vol
    i_noise = float(np.sum(vec_dot(Hv, Hv) * wneg)) * vol
    i_hess = float(np.sum(frob_sq(H, grid.dim) * wneg)) * vol

    lhs = -2.0 * i_pair + 2.0 * p.xi * i_grad + i_noise
    rhs = -2.0 * p.epsilon * (i_hess + i_grad) + 2.0 * (p.epsilon + p.xi) * i_grad
    return rhs - lhs


def small_noise_gap(u_lam: ScalarField, u_det: ScalarField, w: WeightModel) -> float:
    """Weighted L^2 distance between two final states on a common grid."""
    if u_lam.grid != u_det.grid:
        raise ValueError("states live on different grids")
    diff = u_lam.values - u_det.values
    return math.sqrt(integrate_mu(ScalarField(u_lam.grid, diff * diff), w))


def check_report_invariants(r: EnergyReport, w: WeightModel, tol: float = 1e-10) -> None:
    """Sign and finiteness constraints every recorded report must satisfy.

    The area bound is against the weighted torus volume (the unweighted
    bound `area >= 1` only applies when mu(T^n) >= 1)."""
    vals = r.as_row()
    if not all(math.isfinite(x) for x in vals):
        raise AssertionError(f"non-finite report entry: {r}")
    if r.dirichlet < -tol or r.hess_l2 < -tol or r.mixed_term < -tol:
        raise AssertionError(f"sign constraint violated: {r}")
    if r.area < w.mu_volume - tol:
        raise AssertionError(f"area {r.area} below weighted volume {w.mu_volume}")
