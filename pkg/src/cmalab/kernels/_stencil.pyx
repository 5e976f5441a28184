# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Fused stencil kernels for the two-complex-dimension solver.

Single-pass loops over the interior of 4d grids (axes x1, y1, x2, y2);
semantics match kernels.fallback exactly.
"""

import numpy as np

cimport numpy as cnp

IMPL = "cython"


def hessian_fields(object u_in, object h_in):
    """Complex-Hessian entry fields (h11, h22, hre, him) by central FD."""
    cdef cnp.ndarray[cnp.float64_t, ndim=4] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef double[4] ih2
    cdef double[4] hh
    cdef Py_ssize_t a
    h_arr = np.asarray(h_in, dtype=np.float64)
    for a in range(4):
        hh[a] = h_arr[a]
        ih2[a] = 1.0 / (hh[a] * hh[a])
    cdef double c02 = 1.0 / (4.0 * hh[0] * hh[2])
    cdef double c13 = 1.0 / (4.0 * hh[1] * hh[3])
    cdef double c03 = 1.0 / (4.0 * hh[0] * hh[3])
    cdef double c12 = 1.0 / (4.0 * hh[1] * hh[2])
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], n2 = u.shape[2], n3 = u.shape[3]
    cdef cnp.ndarray[cnp.float64_t, ndim=4] h11 = np.zeros((n0, n1, n2, n3))
    cdef cnp.ndarray[cnp.float64_t, ndim=4] h22 = np.zeros((n0, n1, n2, n3))
    cdef cnp.ndarray[cnp.float64_t, ndim=4] hre = np.zeros((n0, n1, n2, n3))
    cdef cnp.ndarray[cnp.float64_t, ndim=4] him = np.zeros((n0, n1, n2, n3))
    cdef Py_ssize_t i, j, k, l
    cdef double c, dxx, dyy
    for i in range(1, n0 - 1):
        for j in range(1, n1 - 1):
            for k in range(1, n2 - 1):
                for l in range(1, n3 - 1):
                    c = u[i, j, k, l]
                    h11[i, j, k, l] = 0.25 * (
                        (u[i + 1, j, k, l] - 2.0 * c + u[i - 1, j, k, l]) * ih2[0]
                        + (u[i, j + 1, k, l] - 2.0 * c + u[i, j - 1, k, l]) * ih2[1])
                    h22[i, j, k, l] = 0.25 * (
                        (u[i, j, k + 1, l] - 2.0 * c + u[i, j, k - 1, l]) * ih2[2]
                        + (u[i, j, k, l + 1] - 2.0 * c + u[i, j, k, l - 1]) * ih2[3])
                    dxx = (u[i + 1, j, k + 1, l] - u[i + 1, j, k - 1, l]
                           - u[i - 1, j, k + 1, l] + u[i - 1, j, k - 1, l]) * c02
                    dyy = (u[i, j + 1, k, l + 1] - u[i, j + 1, k, l - 1]
                           - u[i, j - 1, k, l + 1] + u[i, j - 1, k, l - 1]) * c13
                    hre[i, j, k, l] = 0.25 * (dxx + dyy)
                    dxx = (u[i + 1, j, k, l + 1] - u[i + 1, j, k, l - 1]
                           - u[i - 1, j, k, l + 1] + u[i - 1, j, k, l - 1]) * c03
                    dyy = (u[i, j + 1, k + 1, l] - u[i, j + 1, k - 1, l]
                           - u[i, j - 1, k + 1, l] + u[i, j - 1, k - 1, l]) * c12
                    him[i, j, k, l] = 0.25 * (dxx - dyy)
    return h11, h22, hre, him


def apply_linearization(object p11_in, object p22_in, object p12_in,
                        object q12_in, object v_in, object h_in):
    """Variable-coefficient second-order stencil apply on the interior."""
    cdef cnp.ndarray[cnp.float64_t, ndim=4] p11 = np.ascontiguousarray(p11_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] p22 = np.ascontiguousarray(p22_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] p12 = np.ascontiguousarray(p12_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] q12 = np.ascontiguousarray(q12_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef double[4] ih2
    cdef double[4] hh
    cdef Py_ssize_t a
    h_arr = np.asarray(h_in, dtype=np.float64)
    for a in range(4):
        hh[a] = h_arr[a]
        ih2[a] = 1.0 / (hh[a] * hh[a])
    cdef double c02 = 1.0 / (4.0 * hh[0] * hh[2])
    cdef double c13 = 1.0 / (4.0 * hh[1] * hh[3])
    cdef double c03 = 1.0 / (4.0 * hh[0] * hh[3])
    cdef double c12 = 1.0 / (4.0 * hh[1] * hh[2])
    cdef Py_ssize_t n0 = v.shape[0], n1 = v.shape[1], n2 = v.shape[2], n3 = v.shape[3]
    cdef cnp.ndarray[cnp.float64_t, ndim=4] out = np.zeros((n0, n1, n2, n3))
    cdef Py_ssize_t i, j, k, l
    cdef double c, d11, d22, cr, ci
    for i in range(1, n0 - 1):
        for j in range(1, n1 - 1):
            for k in range(1, n2 - 1):
                for l in range(1, n3 - 1):
                    c = v[i, j, k, l]
                    d11 = ((v[i + 1, j, k, l] - 2.0 * c + v[i - 1, j, k, l]) * ih2[0]
                           + (v[i, j + 1, k, l] - 2.0 * c + v[i, j - 1, k, l]) * ih2[1])
                    d22 = ((v[i, j, k + 1, l] - 2.0 * c + v[i, j, k - 1, l]) * ih2[2]
                           + (v[i, j, k, l + 1] - 2.0 * c + v[i, j, k, l - 1]) * ih2[3])
                    cr = ((v[i + 1, j, k + 1, l] - v[i + 1, j, k - 1, l]
                           - v[i - 1, j, k + 1, l] + v[i - 1, j, k - 1, l]) * c02
                          + (v[i, j + 1, k, l + 1] - v[i, j + 1, k, l - 1]
                             - v[i, j - 1, k, l + 1] + v[i, j - 1, k, l - 1]) * c13)
                    ci = ((v[i + 1, j, k, l + 1] - v[i + 1, j, k, l - 1]
                           - v[i - 1, j, k, l + 1] + v[i - 1, j, k, l - 1]) * c03
                          - (v[i, j + 1, k + 1, l] - v[i, j + 1, k - 1, l]
                             - v[i, j - 1, k + 1, l] + v[i, j - 1, k - 1, l]) * c12)
                    out[i, j, k, l] = (0.25 * (p11[i, j, k, l] * d11
                                               + p22[i, j, k, l] * d22
                                               + 2.0 * p12[i, j, k, l] * cr)
                                       + 0.5 * q12[i, j, k, l] * ci)
    return out
