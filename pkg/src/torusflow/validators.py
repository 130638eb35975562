"""Small-instance oracle checks of the algebraic facts the energy estimates
rest on. These run in milliseconds and gate every experiment (CLI
`validate` subcommand): if a lemma check fails, no simulation output is
trustworthy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fieldmath import area_q
from .hfuncs import HFunction, h_area, h_plateau, h_quadratic, is_admissible


def rank_one_eigs(a: float, b: float, v: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a Id + b v (x) v: a (multiplicity n-1) and a + b |v|^2."""
    v = np.asarray(v, dtype=np.float64)
    return float(a), float(a + b * float(v @ v))


def trace_product_check(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> float:
    """tr((AB)(CA)^T) for symmetric A and PSD B, C; non-negative in exact
    arithmetic. Returns the computed value; callers assert >= -1e-12."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    for name, M in (("A", A), ("B", B), ("C", C)):
        if not np.allclose(M, M.T, atol=1e-10):
            raise ValueError(f"{name} must be symmetric")
    return float(np.sum((A @ B) * (C @ A)))


def _g_closed(hf: HFunction, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form gradient and Hessian of g(p) = h(Q(p))."""
    n = p.shape[0]
    q = float(area_q(p.reshape(n, 1))[0])
    v = p / q
    hp = float(np.asarray(hf.dh(q)))
    hpp = float(np.asarray(hf.d2h(q)))
    grad = hp * v
    hess = hpp * np.outer(v, v) + (hp / q) * (np.eye(n) - np.outer(v, v))
    return grad, hess


def g_derivatives_check(hf: HFunction, p: np.ndarray, fd_step: float = 1e-5) -> float:
    """Max deviation of the closed-form grad/Hessian of g(p) = h(Q(p)) from
    central finite differences with step 1e-5.

    The gradient is differenced from g directly; the Hessian is the FD
    Jacobian of the closed-form gradient (so both checks are first
    differences at their cancellation/truncation-balanced step; a second
    difference of g itself would be cancellation-limited near 1e-5 |h| and
    could not resolve the 1e-6 contract). Together they verify the chain
    g -> grad g -> D^2 g end to end. Callers assert <= 1e-6 (1 + |p|^2)."""
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]

    def g(x):
        return float(np.asarray(hf.h(float(area_q(x.reshape(n, 1))[0]))))

    grad_cf, hess_cf = _g_closed(hf, p)
    worst = 0.0
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = fd_step
        fd = (g(p + ei) - g(p - ei)) / (2.0 * fd_step)
        worst = max(worst, abs(fd - grad_cf[i]))
        col = (_g_closed(hf, p + ei)[0] - _g_closed(hf, p - ei)[0]) / (2.0 * fd_step)
        worst = max(worst, float(np.max(np.abs(col - hess_cf[:, i]))))
    return worst


def positive_combo_check(hf: HFunction, p: np.ndarray) -> tuple[float, float]:
    """The two eigenvalues of D^2 g - g/(2Q^2) (Id - v (x) v) for g = h(Q):

        h'(Q)/Q - h(Q)/(2Q^2)   and   h'(Q)/Q^3 - h(Q)/(2Q^4) + h''(Q)|p|^2/Q^2.

    Both are non-negative for admissible h; inadmissible h is rejected."""
    if not is_admissible(hf):
        raise ValueError(f"h spec {hf.name!r} is not admissible")
    p = np.asarray(p, dtype=np.float64)
    q = float(area_q(p.reshape(p.shape[0], 1))[0])
    h = float(np.asarray(hf.h(q)))
    hp = float(np.asarray(hf.dh(q)))
    hpp = float(np.asarray(hf.d2h(q)))
    lam1 = hp / q - h / (2.0 * q * q)
    lam2 = hp / q**3 - h / (2.0 * q**4) + hpp * float(p @ p) / (q * q)
    return lam1, lam2


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str = ""


def _random_h(rng: np.random.Generator) -> HFunction:
    kind = rng.integers(0, 3)
    scale = float(rng.uniform(0.1, 2.0))
    if kind == 0:
        return h_area(scale)
    if kind == 1:
        return h_quadratic(scale)
    return h_plateau(float(rng.uniform(1.0, 3.0)), scale)


def _sample_p(rng: np.random.Generator, hf: HFunction, fd_step: float) -> np.ndarray:
    """Random point, kept away from the h_M knots where the FD oracle is
    invalid (h_M is only C^1 there)."""
    while True:
        n = int(rng.integers(1, 4))
        p = rng.uniform(-3.0, 3.0, size=n)
        if hf.name != "h_M":
            return p
        q = float(np.sqrt(1.0 + p @ p))
        M = hf.params["M"]
        if min(abs(q - M), abs(q - (M + 1.0))) > 100.0 * fd_step:
            return p


def run_all(trials: int = 10_000, seed: int = 20_240_811) -> list[CheckResult]:
    """Randomized suite over all four lemma validators plus the
    x h'(x) - h(x) monotonicity property."""
    rng = np.random.default_rng(seed)
    results = []

    worst = 0.0
    ok = True
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        a = float(rng.normal())
        b = float(rng.normal())
        v = rng.normal(size=n)
        lo, hi = rank_one_eigs(a, b, v)
        dense = np.linalg.eigvalsh(a * np.eye(n) + b * np.outer(v, v))
        expect = np.sort(np.array([a] * (n - 1) + [hi]))
        err = float(np.max(np.abs(dense - expect)))
        worst = max(worst, err)
        ok = ok and err <= 1e-10 and lo == a
    results.append(CheckResult("rank_one_eigs", ok, worst, "vs dense eigensolver, tol 1e-10"))

    worst = np.inf
    ok = True
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        A = rng.normal(size=(n, n)) / n
        A = 0.5 * (A + A.T)
        G1 = rng.normal(size=(n, n)) / n
        G2 = rng.normal(size=(n, n)) / n
        val = trace_product_check(A, G1 @ G1.T, G2 @ G2.T)
        worst = min(worst, val)
        ok = ok and val >= -1e-12
    results.append(CheckResult("trace_product_check", ok, worst, "min over PSD Gram inputs"))

    worst = 0.0
    ok = True
    for _ in range(trials):
        hf = _random_h(rng)
        p = _sample_p(rng, hf, 1e-5)
        err = g_derivatives_check(hf, p)
        tol = 1e-6 * (1.0 + float(p @ p))
        worst = max(worst, err / tol)
        ok = ok and err <= tol
    results.append(
        CheckResult("g_derivatives_check", ok, worst, "worst error / tolerance ratio")
    )

    worst = np.inf
    ok = True
    for _ in range(trials):
        hf = _random_h(rng)
        p = rng.uniform(-3.0, 3.0, size=int(rng.integers(1, 4)))
        lam1, lam2 = positive_combo_check(hf, p)
        worst = min(worst, lam1, lam2)
        ok = ok and lam1 >= -1e-12 and lam2 >= -1e-12
    results.append(CheckResult("positive_combo_check", ok, worst, "min eigenvalue expression"))

    worst = np.inf
    ok = True
    xs = 1.0 + np.linspace(0.0, 4.0, 257) ** 2
    for _ in range(max(1, trials // 100)):
        hf = _random_h(rng)
        vals = xs * np.asarray(hf.dh(xs)) - np.asarray(hf.h(xs))
        d = float(np.min(np.diff(vals)))
        worst = min(worst, d)
        ok = ok and d >= -1e-12
    results.append(
        CheckResult("xh'-h monotone", ok, worst, "min increment over sampled x grid")
    )
    return results
