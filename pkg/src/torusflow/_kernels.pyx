# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled periodic stencil kernels for 1D and 2D grids.

Every expression mirrors the arithmetic order of ``_stencils_np`` exactly
(and the build disables FP contraction), so the two backends agree bit for
bit. 3D grids stay on the numpy path, where per-call overhead is already
negligible relative to the work.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gradient_c_1d(double[::1] u, double inv2h):
    cdef Py_ssize_t n = u.shape[0], j, jp, jm
    out_arr = np.empty((1, n))
    cdef double[:, ::1] out = out_arr
    for j in range(n):
        jp = j + 1
        if jp == n:
            jp = 0
        jm = j - 1
        if jm < 0:
            jm = n - 1
        out[0, j] = (u[jp] - u[jm]) * inv2h
    return out_arr


def gradient_c_2d(double[:, ::1] u, double inv2h):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], i, j, ip, im, jp, jm
    out_arr = np.empty((2, n0, n1))
    cdef double[:, :, ::1] out = out_arr
    for i in range(n0):
        ip = i + 1
        if ip == n0:
            ip = 0
        im = i - 1
        if im < 0:
            im = n0 - 1
        for j in range(n1):
            jp = j + 1
            if jp == n1:
                jp = 0
            jm = j - 1
            if jm < 0:
                jm = n1 - 1
            out[0, i, j] = (u[ip, j] - u[im, j]) * inv2h
            out[1, i, j] = (u[i, jp] - u[i, jm]) * inv2h
    return out_arr


def gradient_f_1d(double[::1] u, double invh):
    cdef Py_ssize_t n = u.shape[0], j, jp
    out_arr = np.empty((1, n))
    cdef double[:, ::1] out = out_arr
    for j in range(n):
        jp = j + 1
        if jp == n:
            jp = 0
        out[0, j] = (u[jp] - u[j]) * invh
    return out_arr


def gradient_f_2d(double[:, ::1] u, double invh):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], i, j, ip, jp
    out_arr = np.empty((2, n0, n1))
    cdef double[:, :, ::1] out = out_arr
    for i in range(n0):
        ip = i + 1
        if ip == n0:
            ip = 0
        for j in range(n1):
            jp = j + 1
            if jp == n1:
                jp = 0
            out[0, i, j] = (u[ip, j] - u[i, j]) * invh
            out[1, i, j] = (u[i, jp] - u[i, j]) * invh
    return out_arr


def hessian_1d(double[::1] u, double invh2, double inv4h2):
    cdef Py_ssize_t n = u.shape[0], j, jp, jm
    out_arr = np.empty((1, n))
    cdef double[:, ::1] out = out_arr
    for j in range(n):
        jp = j + 1
        if jp == n:
            jp = 0
        jm = j - 1
        if jm < 0:
            jm = n - 1
        out[0, j] = (u[jp] - 2.0 * u[j] + u[jm]) * invh2
    return out_arr


def hessian_2d(double[:, ::1] u, double invh2, double inv4h2):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], i, j, ip, im, jp, jm
    out_arr = np.empty((3, n0, n1))
    cdef double[:, :, ::1] out = out_arr
    for i in range(n0):
        ip = i + 1
        if ip == n0:
            ip = 0
        im = i - 1
        if im < 0:
            im = n0 - 1
        for j in range(n1):
            jp = j + 1
            if jp == n1:
                jp = 0
            jm = j - 1
            if jm < 0:
                jm = n1 - 1
            out[0, i, j] = (u[ip, j] - 2.0 * u[i, j] + u[im, j]) * invh2
            out[1, i, j] = (u[ip, jp] - u[ip, jm] - u[im, jp] + u[im, jm]) * inv4h2
            out[2, i, j] = (u[i, jp] - 2.0 * u[i, j] + u[i, jm]) * invh2
    return out_arr


def laplacian_f_1d(double[::1] u, double[:, ::1] wface, double[::1] expf, double invh2):
    cdef Py_ssize_t n = u.shape[0], j, jp, jm
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    for j in range(n):
        jp = j + 1
        if jp == n:
            jp = 0
        jm = j - 1
        if jm < 0:
            jm = n - 1
        out[j] = (
            (wface[0, j] * (u[jp] - u[j]) - wface[0, jm] * (u[j] - u[jm])) * invh2
        ) * expf[j]
    return out_arr


def laplacian_f_2d(
    double[:, ::1] u, double[:, :, ::1] wface, double[:, ::1] expf, double invh2
):
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], i, j, ip, im, jp, jm
    cdef double t0, t1
    out_arr = np.empty((n0, n1))
    cdef double[:, ::1] out = out_arr
    for i in range(n0):
        ip = i + 1
        if ip == n0:
            ip = 0
        im = i - 1
        if im < 0:
            im = n0 - 1
        for j in range(n1):
            jp = j + 1
            if jp == n1:
                jp = 0
            jm = j - 1
            if jm < 0:
                jm = n1 - 1
            t0 = wface[0, i, j] * (u[ip, j] - u[i, j]) - wface[0, im, j] * (u[i, j] - u[im, j])
            t1 = wface[1, i, j] * (u[i, jp] - u[i, j]) - wface[1, i, jm] * (u[i, j] - u[i, jm])
            out[i, j] = ((t0 + t1) * invh2) * expf[i, j]
    return out_arr


def div_f_1d(double[:, ::1] V, double[:, ::1] gradf, double inv2h):
    cdef Py_ssize_t n = V.shape[1], j, jp, jm
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    for j in range(n):
        jp = j + 1
        if jp == n:
            jp = 0
        jm = j - 1
        if jm < 0:
            jm = n - 1
        out[j] = (V[0, jp] - V[0, jm]) * inv2h - gradf[0, j] * V[0, j]
    return out_arr


def div_f_2d(double[:, :, ::1] V, double[:, :, ::1] gradf, double inv2h):
    cdef Py_ssize_t n0 = V.shape[1], n1 = V.shape[2], i, j, ip, im, jp, jm
    cdef double acc, dot
    out_arr = np.empty((n0, n1))
    cdef double[:, ::1] out = out_arr
    for i in range(n0):
        ip = i + 1
        if ip == n0:
            ip = 0
        im = i - 1
        if im < 0:
            im = n0 - 1
        for j in range(n1):
            jp = j + 1
            if jp == n1:
                jp = 0
            jm = j - 1
            if jm < 0:
                jm = n1 - 1
            acc = (V[0, ip, j] - V[0, im, j]) * inv2h + (V[1, i, jp] - V[1, i, jm]) * inv2h
            dot = gradf[0, i, j] * V[0, i, j] + gradf[1, i, j] * V[1, i, j]
            out[i, j] = acc - dot
    return out_arr
