"""Pure-numpy periodic stencil kernels.

The arithmetic order here is canonical: the compiled kernels in
``_kernels.pyx`` mirror every expression operation for operation, so both
backends produce bit-identical fields (the extension is compiled with
FP contraction disabled for the same reason).

All kernels take and return plain float64 arrays; wrapping into field
types happens one layer up.
"""

import numpy as np


def gradient_c(u: np.ndarray, inv2h: float) -> np.ndarray:
    """Central-difference gradient; component a of the output is d/dx_a."""
    out = np.empty((u.ndim,) + u.shape)
    for a in range(u.ndim):
        out[a] = (np.roll(u, -1, axis=a) - np.roll(u, 1, axis=a)) * inv2h
    return out


def gradient_f(u: np.ndarray, invh: float) -> np.ndarray:
    """Forward gradient: component a lives on the face (j, j+e_a), indexed by j."""
    out = np.empty((u.ndim,) + u.shape)
    for a in range(u.ndim):
        out[a] = (np.roll(u, -1, axis=a) - u) * invh
    return out


def hessian(u: np.ndarray, invh2: float, inv4h2: float) -> np.ndarray:
    """Second derivatives in symmetric storage: pairs (a,b), a <= b, lexicographic.

    Diagonal entries use the 3-point second difference, off-diagonal the
    4-point cross stencil.
    """
    n = u.ndim
    out = np.empty((n * (n + 1) // 2,) + u.shape)
    k = 0
    for a in range(n):
        for b in range(a, n):
            if a == b:
                out[k] = (np.roll(u, -1, axis=a) - 2.0 * u + np.roll(u, 1, axis=a)) * invh2
            else:
                up = np.roll(u, -1, axis=a)
                um = np.roll(u, 1, axis=a)
                out[k] = (
                    np.roll(up, -1, axis=b)
                    - np.roll(up, 1, axis=b)
                    - np.roll(um, -1, axis=b)
                    + np.roll(um, 1, axis=b)
                ) * inv4h2
            k += 1
    return out


def laplacian_f(
    u: np.ndarray,
    wface: np.ndarray,
    wface_prev: np.ndarray,
    expf: np.ndarray,
    invh2: float,
) -> np.ndarray:
    """Mimetic weighted Laplacian in flux form.

    ``wface[a]`` holds e^{-f} at the face (j, j+e_a) indexed by j;
    ``wface_prev[a]`` is the same array shifted so index j holds the face
    (j-e_a, j); ``expf`` is e^{+f} at the nodes.
    """
    acc = wface[0] * (np.roll(u, -1, axis=0) - u) - wface_prev[0] * (u - np.roll(u, 1, axis=0))
    for a in range(1, u.ndim):
        acc = acc + (
            wface[a] * (np.roll(u, -1, axis=a) - u)
            - wface_prev[a] * (u - np.roll(u, 1, axis=a))
        )
    return (acc * invh2) * expf


def div_f(V: np.ndarray, gradf: np.ndarray, inv2h: float) -> np.ndarray:
    """Weighted divergence of a node-collocated vector field: div V - grad f . V."""
    acc = (np.roll(V[0], -1, axis=0) - np.roll(V[0], 1, axis=0)) * inv2h
    for a in range(1, V.shape[0]):
        acc = acc + (np.roll(V[a], -1, axis=a) - np.roll(V[a], 1, axis=a)) * inv2h
    dot = gradf[0] * V[0]
    for a in range(1, V.shape[0]):
        dot = dot + gradf[a] * V[a]
    return acc - dot
