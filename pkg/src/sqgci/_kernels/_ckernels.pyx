# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled reductions and quadratures.

All loops run in fixed lexicographic index order so results are bitwise
reproducible for a given input array.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, pow, fabs, sqrt, M_PI

cnp.import_array()


def phi_hat_sine(double[::1] x, double[::1] phi, double[::1] xi, double h):
    """h * sum_j phi_j sin(2 pi x_j xi_m) for every xi_m."""
    cdef Py_ssize_t m, j
    cdef Py_ssize_t nx = x.shape[0], nxi = xi.shape[0]
    cdef double acc, w
    out = np.empty(nxi, dtype=np.float64)
    cdef double[::1] o = out
    for m in range(nxi):
        w = 2.0 * M_PI * xi[m]
        acc = 0.0
        for j in range(nx):
            acc += phi[j] * sin(w * x[j])
        o[m] = h * acc
    return out


cdef inline void _nsum(double* acc, double* comp, double x) noexcept nogil:
    """Neumaier compensated accumulation of ``x`` into ``acc``."""
    cdef double t = acc[0] + x
    if fabs(acc[0]) >= fabs(x):
        comp[0] += (acc[0] - t) + x
    else:
        comp[0] += (x - t) + acc[0]
    acc[0] = t


cdef inline double _freq(Py_ssize_t i, Py_ssize_t n) nogil:
    if i < n // 2:
        return <double>i
    return <double>(i - n)


def sobolev_sq_sum(double complex[:, ::1] c, double s):
    """sum over j != 0 of |j|^(2s) |c_j|^2 (FFT index layout)."""
    cdef Py_ssize_t n1 = c.shape[0], n2 = c.shape[1], i1, i2
    cdef double acc = 0.0, comp = 0.0, j1, j2, r2, re, im
    for i1 in range(n1):
        j1 = _freq(i1, n1)
        for i2 in range(n2):
            j2 = _freq(i2, n2)
            r2 = j1 * j1 + j2 * j2
            if r2 == 0.0:
                continue
            re = c[i1, i2].real
            im = c[i1, i2].imag
            _nsum(&acc, &comp, pow(r2, s) * (re * re + im * im))
    return acc + comp


def tensor_sobolev_sq_sum(double complex[:, ::1] a11, double complex[:, ::1] a12,
                          double complex[:, ::1] a22, double s):
    """sum over j != 0 of |j|^(2s) ||A_j||_op^2 for symmetric complex 2x2 A_j."""
    cdef Py_ssize_t n1 = a11.shape[0], n2 = a11.shape[1], i1, i2
    cdef double acc = 0.0, comp = 0.0, j1, j2, r2, ay2, h11, h22, d, h12r, h12i
    cdef double complex x, y, z
    for i1 in range(n1):
        j1 = _freq(i1, n1)
        for i2 in range(n2):
            j2 = _freq(i2, n2)
            r2 = j1 * j1 + j2 * j2
            if r2 == 0.0:
                continue
            x = a11[i1, i2]
            y = a12[i1, i2]
            z = a22[i1, i2]
            # largest eigenvalue of A^H A, written without cancellation
            ay2 = y.real * y.real + y.imag * y.imag
            h11 = x.real * x.real + x.imag * x.imag + ay2
            h22 = ay2 + z.real * z.real + z.imag * z.imag
            h12r = x.real * y.real + x.imag * y.imag + y.real * z.real + y.imag * z.imag
            h12i = x.real * y.imag - x.imag * y.real + y.real * z.imag - y.imag * z.real
            d = 0.5 * (h11 - h22)
            _nsum(&acc, &comp, pow(r2, s) * (0.5 * (h11 + h22) + sqrt(d * d + h12r * h12r + h12i * h12i)))
    return acc + comp


def abs_pow_sum(double[::1] a, double p):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0, comp = 0.0
    if p == 1.0:
        for i in range(n):
            _nsum(&acc, &comp, fabs(a[i]))
    elif p == 2.0:
        for i in range(n):
            _nsum(&acc, &comp, a[i] * a[i])
    else:
        for i in range(n):
            _nsum(&acc, &comp, pow(fabs(a[i]), p))
    return acc + comp


def hypot_pow_sum(double[::1] a, double[::1] b, double p):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0, comp = 0.0, r2
    for i in range(n):
        r2 = a[i] * a[i] + b[i] * b[i]
        if p == 2.0:
            _nsum(&acc, &comp, r2)
        else:
            _nsum(&acc, &comp, pow(r2, 0.5 * p))
    return acc + comp


def hypot_max(double[::1] a, double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double m = 0.0, r2
    for i in range(n):
        r2 = a[i] * a[i] + b[i] * b[i]
        if r2 > m:
            m = r2
    return sqrt(m)
