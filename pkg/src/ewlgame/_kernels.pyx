# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Semantics match ``ewlgame._kernels_py`` exactly."""
from libc.math cimport sqrt, sin, cos

import numpy as np


def density_grid_max(double m00, double m01, double m10, double m11, double corr,
                     const double[::1] t, const double[::1] s,
                     double[::1] out_max, long[::1] out_arg):
    """Row-wise maximum over ``t`` of the density payoff for each ``s``.

    Ties resolve to the smallest index.
    """
    cdef Py_ssize_t nt = t.shape[0], ns = s.shape[0], i, j, best_i
    cdef double sj, p0, p1, kap, v, best
    cdef double[::1] root = np.empty(nt)
    for i in range(nt):
        root[i] = sqrt(t[i] * (1.0 - t[i])) if 0.0 < t[i] < 1.0 else 0.0
    with nogil:
        for j in range(ns):
            sj = s[j]
            p0 = (1.0 - sj) * m00 + sj * m01
            p1 = (1.0 - sj) * m10 + sj * m11
            kap = corr * sqrt(sj * (1.0 - sj)) if 0.0 < sj < 1.0 else 0.0
            best = p0 + (p1 - p0) * t[0] + kap * root[0]
            best_i = 0
            for i in range(1, nt):
                v = p0 + (p1 - p0) * t[i] + kap * root[i]
                if v > best:
                    best = v
                    best_i = i
            out_max[j] = best
            out_arg[j] = best_i


def statevector_payoffs(double gamma, double xi0, double xi1, double u0, double u1,
                        double a00, double a01, double a10, double a11,
                        const double[::1] x1, const double[::1] y1,
                        double[::1] out1, double[::1] out2):
    """Both players' payoffs from the entangled state, element-wise."""
    cdef Py_ssize_t n = x1.shape[0], k
    cdef double c = cos(0.5 * gamma), s = sin(0.5 * gamma)
    cdef double complex I = 1j
    cdef double complex e0 = cos(xi0) + I * sin(xi0)
    cdef double complex e1 = cos(xi1) + I * sin(xi1)
    cdef double complex f0 = cos(u0) + I * sin(u0)
    cdef double complex f1 = cos(u1) + I * sin(u1)
    cdef double complex al0, al1, be0, be1, p00, p01, p10, p11, q00, q01, q10, q11
    cdef double w00, w01, w10, w11, xa, ya
    with nogil:
        for k in range(n):
            xa = x1[k]
            ya = y1[k]
            al0 = sqrt(1.0 - xa) * e0
            al1 = sqrt(xa) * e1
            be0 = sqrt(1.0 - ya) * f0
            be1 = sqrt(ya) * f1
            # (U_a x U_b) applied to c|00> + i s|11>
            p00 = c * al0 * be0 + I * s * al1 * be1
            p01 = -c * al0 * be1.conjugate() + I * s * al1 * be0.conjugate()
            p10 = -c * al1.conjugate() * be0 + I * s * al0.conjugate() * be1
            p11 = c * al1.conjugate() * be1.conjugate() + I * s * al0.conjugate() * be0.conjugate()
            # adjoint entangler
            q00 = c * p00 - I * s * p11
            q11 = c * p11 - I * s * p00
            q01 = c * p01 + I * s * p10
            q10 = c * p10 + I * s * p01
            w00 = q00.real * q00.real + q00.imag * q00.imag
            w01 = q01.real * q01.real + q01.imag * q01.imag
            w10 = q10.real * q10.real + q10.imag * q10.imag
            w11 = q11.real * q11.real + q11.imag * q11.imag
            out1[k] = a00 * w00 + a01 * w01 + a10 * w10 + a11 * w11
            out2[k] = a00 * w00 + a10 * w01 + a01 * w10 + a11 * w11
