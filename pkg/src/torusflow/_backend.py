"""Stencil backend selection.

The compiled extension covers the hot kernels for 1D and 2D grids; 3D
grids (and any forced-fallback run) use the pure-numpy twin. Both produce
bit-identical output. Selection happens once at import:

* ``TORUSFLOW_BACKEND=auto``   (default) compiled if importable, else numpy
* ``TORUSFLOW_BACKEND=numpy``  force the pure-python fallback
* ``TORUSFLOW_BACKEND=cython`` require the extension, raise if missing
"""

import os

import numpy as np

from . import _stencils_np

_requested = os.environ.get("TORUSFLOW_BACKEND", "auto").lower()
if _requested not in ("auto", "numpy", "cython"):
    raise ValueError(f"TORUSFLOW_BACKEND must be auto|numpy|cython, got {_requested!r}")

_kernels = None
if _requested in ("auto", "cython"):
    try:
        from . import _kernels as _kernels_mod

        _kernels = _kernels_mod
    except ImportError:
        if _requested == "cython":
            raise

ACTIVE = "cython" if _kernels is not None else "numpy"


def gradient_c(u: np.ndarray, inv2h: float) -> np.ndarray:
    if _kernels is not None:
        if u.ndim == 1:
            return _kernels.gradient_c_1d(u, inv2h)
        if u.ndim == 2:
            return _kernels.gradient_c_2d(u, inv2h)
    return _stencils_np.gradient_c(u, inv2h)


def gradient_f(u: np.ndarray, invh: float) -> np.ndarray:
    if _kernels is not None:
        if u.ndim == 1:
            return _kernels.gradient_f_1d(u, invh)
        if u.ndim == 2:
            return _kernels.gradient_f_2d(u, invh)
    return _stencils_np.gradient_f(u, invh)


def hessian(u: np.ndarray, invh2: float, inv4h2: float) -> np.ndarray:
    if _kernels is not None:
        if u.ndim == 1:
            return _kernels.hessian_1d(u, invh2, inv4h2)
        if u.ndim == 2:
            return _kernels.hessian_2d(u, invh2, inv4h2)
    return _stencils_np.hessian(u, invh2, inv4h2)


def laplacian_f(
    u: np.ndarray,
    wface: np.ndarray,
    wface_prev: np.ndarray,
    expf: np.ndarray,
    invh2: float,
) -> np.ndarray:
    if _kernels is not None:
        if u.ndim == 1:
            return _kernels.laplacian_f_1d(u, wface, expf, invh2)
        if u.ndim == 2:
            return _kernels.laplacian_f_2d(u, wface, expf, invh2)
    return _stencils_np.laplacian_f(u, wface, wface_prev, expf, invh2)


def div_f(V: np.ndarray, gradf: np.ndarray, inv2h: float) -> np.ndarray:
    if _kernels is not None:
        if V.ndim == 2:
            return _kernels.div_f_1d(V, gradf, inv2h)
        if V.ndim == 3:
            return _kernels.div_f_2d(V, gradf, inv2h)
    return _stencils_np.div_f(V, gradf, inv2h)
