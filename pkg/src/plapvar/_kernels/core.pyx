# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled energy/gradient kernels; same contract as pyfallback."""

import numpy as np

cimport cython
from libc.math cimport fabs, pow

BACKEND = "cython"


cdef inline double _phi(double t, double p) nogil:
    if t > 0.0:
        return pow(t, p - 1.0)
    elif t < 0.0:
        return -pow(-t, p - 1.0)
    return 0.0


def phi_vals(x, double p):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _phi(xv[i], p)
    return out


def energy(w, double p2, double p1, double q, double a, V):
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] Vv = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    cdef Py_ssize_t i
    cdef double s2 = 0.0, s1 = 0.0, sv = 0.0, d
    for i in range(n - 2):
        d = wv[i + 2] - 2.0 * wv[i + 1] + wv[i]
        s2 += pow(fabs(d), p2)
    for i in range(n - 1):
        d = wv[i + 1] - wv[i]
        s1 += pow(fabs(d), p1)
    for i in range(n - 4):
        sv += Vv[i] * pow(fabs(wv[i + 2]), q)
    return s2 / p2 + a * s1 / p1 + sv / q


def grad(w, double p2, double p1, double q, double a, V):
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] Vv = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0]
    cdef Py_ssize_t m = n - 4
    cdef Py_ssize_t i
    g2_arr = np.empty(n - 2, dtype=np.float64)
    g1_arr = np.empty(n - 1, dtype=np.float64)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] g2 = g2_arr
    cdef double[::1] g1 = g1_arr
    cdef double[::1] ov = out
    for i in range(n - 2):
        g2[i] = _phi(wv[i + 2] - 2.0 * wv[i + 1] + wv[i], p2)
    for i in range(n - 1):
        g1[i] = _phi(wv[i + 1] - wv[i], p1)
    for i in range(m):
        ov[i] = (g2[i + 2] - 2.0 * g2[i + 1] + g2[i]
                 - a * (g1[i + 2] - g1[i + 1])
                 + Vv[i] * _phi(wv[i + 2], q))
    return out
