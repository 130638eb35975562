"""Pointwise algebra on raw arrays, shared by the SPDE core and diagnostics.

Accumulation order is fixed (ascending component index) so results are
deterministic and backend-independent.
"""

import numpy as np


def sym_pairs(n: int) -> list[tuple[int, int]]:
    """Index pairs (a, b), a <= b, in the symmetric storage order."""
    return [(a, b) for a in range(n) for b in range(a, n)]


def vec_dot(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pointwise dot product of two (n, *shape) component stacks."""
    acc = A[0] * B[0]
    for a in range(1, A.shape[0]):
        acc = acc + A[a] * B[a]
    return acc


def sym_matvec(H: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Pointwise H @ V for symmetric-storage H (m, *shape) and V (n, *shape)."""
    n = V.shape[0]
    out = np.zeros_like(V)
    k = 0
    for a in range(n):
        for b in range(a, n):
            out[a] += H[k] * V[b]
            if a != b:
                out[b] += H[k] * V[a]
            k += 1
    return out


def quad_form(H: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Pointwise V . H V."""
    return vec_dot(V, sym_matvec(H, V))


def frob_sq(H: np.ndarray, n: int) -> np.ndarray:
    """Pointwise squared Frobenius norm; off-diagonal entries count twice."""
    k = 0
    acc = None
    for a in range(n):
        for b in range(a, n):
            term = H[k] * H[k] if a == b else 2.0 * (H[k] * H[k])
            acc = term if acc is None else acc + term
            k += 1
    return acc


def area_q(G: np.ndarray) -> np.ndarray:
    """Graph area element sqrt(1 + |p|^2) from a gradient stack."""
    return np.sqrt(1.0 + vec_dot(G, G))


def tilt_v(G: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Normal tilt p / sqrt(1 + |p|^2); pass q = area_q(G)."""
    return G / q
