# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the inner loops in :mod:`mboot._ext.pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport erfc, exp, sqrt

cnp.import_array()

cdef double SQRT1_2 = 0.7071067811865475244
cdef double INV_SQRT_2PI = 0.3989422804014326779


cdef inline double _height(const double[:] u, const double[:, :] d,
                           const double[:, :, :] e, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t a, b, c
    cdef double s = 0.0, ub
    for a in range(k):
        for b in range(k):
            ub = u[a] * u[b]
            s -= d[a, b] * ub
            for c in range(k):
                s -= e[a, b, c] * ub * u[c]
    return s


def graph_prob(const double[:, :] ya, const double[:] yp, double tau,
               const double[:, :] tnodes, const double[:] tweights,
               const double[:, :] d, const double[:, :, :] e):
    cdef Py_ssize_t n = ya.shape[0], m = tnodes.shape[0], k = ya.shape[1]
    cdef Py_ssize_t i, j, a
    cdef double s, q, x, inv_tau = 1.0 / tau
    prob_arr = np.empty(n)
    dens_arr = np.empty(n)
    cdef double[:] prob = prob_arr
    cdef double[:] dens = dens_arr
    cdef double[:] u = np.empty(k)
    with nogil:
        for i in range(n):
            s = 0.0
            q = 0.0
            for j in range(m):
                for a in range(k):
                    u[a] = ya[i, a] + tau * tnodes[j, a]
                x = (_height(u, d, e, k) - yp[i]) * inv_tau
                s += tweights[j] * 0.5 * erfc(-x * SQRT1_2)
                q += tweights[j] * INV_SQRT_2PI * exp(-0.5 * x * x)
            prob[i] = s
            dens[i] = q * inv_tau
    return prob_arr, dens_arr


def graph_inner_means(const double[:, :] ya, const double[:] yp, double tau,
                      const double[:, :, :] z, const double[:, :] d,
                      const double[:, :, :] e):
    cdef Py_ssize_t n = z.shape[0], m = z.shape[1], k = ya.shape[1]
    cdef Py_ssize_t i, j, a
    cdef long count
    out_arr = np.empty(n)
    cdef double[:] out = out_arr
    cdef double[:] u = np.empty(k)
    with nogil:
        for i in range(n):
            count = 0
            for j in range(m):
                for a in range(k):
                    u[a] = ya[i, a] + tau * z[i, j, a]
                if yp[i] + tau * z[i, j, k] <= _height(u, d, e, k):
                    count += 1
            out[i] = count / <double> m
    return out_arr
