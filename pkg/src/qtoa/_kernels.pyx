# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Must stay semantically identical to ``_kernels_py``; the test suite pins the
two backends against each other. See the numpy module for the derivations
and the cancellation-free forms used here.
"""
from libc.math cimport cos, exp, fabs, sin, sqrt

import numpy as np


cdef double SQRT_2PI = sqrt(2.0 * 3.141592653589793)


def toa_exact_batch(xi, double t_c, double q, double sigma_over_x):
    """Arrival times for an array of fluctuation values xi <= x/sigma."""
    cdef double[::1] v = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double half_beta = sigma_over_x / (2.0 * q)
    cdef double hb2 = half_beta * half_beta
    cdef double u, s, R, f
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            u = q * v[i]
            s = sigma_over_x * v[i]
            R = sqrt(1.0 + u * u + hb2)
            if u <= 0.0:
                f = 1.0 + 2.0 * u * u - 2.0 * u * R
            else:
                f = (1.0 - s * s) / (1.0 + 2.0 * u * u + 2.0 * u * R)
            if f < 0.0:
                f = 0.0
            out[i] = t_c * sqrt(f)
    return out_arr


def gaussian_flux_grid(t, double x, double g, double sigma, double tau):
    """Un-normalized single-packet arrival density on a time grid."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = tv.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double ratio, root, st, sd, d, bracket
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            ratio = tv[i] / tau
            root = sqrt(1.0 + ratio * ratio)
            st = sigma * root
            sd = sigma * (tv[i] / (tau * tau)) / root
            d = x - 0.5 * g * tv[i] * tv[i]
            bracket = fabs(g * tv[i] * st + d * sd)
            out[i] = bracket / (st * st) * exp(-0.5 * (d / st) * (d / st)) / SQRT_2PI
    return out_arr


def superposition_current_grid(t, double x, double m, double g, double hbar,
                               double sigma, double k1, double k2, double nsq):
    """Probability current of a two-packet superposition at position x."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = tv.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double tau = 2.0 * m * sigma * sigma / hbar
    cdef double vk = hbar / m
    cdef double st2, lam2, x1, x2, d1, d2, rho1, rho2, u1, u2
    cdef double spread, drift, v1, v2, dphi, cross, ti
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            ti = tv[i]
            st2 = sigma * sigma * (1.0 + (ti / tau) * (ti / tau))
            lam2 = hbar * ti / m
            x1 = vk * k1 * ti + 0.5 * g * ti * ti
            x2 = vk * k2 * ti + 0.5 * g * ti * ti
            d1 = x - x1
            d2 = x - x2
            rho1 = exp(-0.5 * d1 * d1 / st2) / sqrt(2.0 * 3.141592653589793 * st2)
            rho2 = exp(-0.5 * d2 * d2 / st2) / sqrt(2.0 * 3.141592653589793 * st2)
            u1 = -vk * d1 / (2.0 * st2)
            u2 = -vk * d2 / (2.0 * st2)
            spread = lam2 / (4.0 * sigma * sigma * st2)
            drift = m * g * ti / hbar
            v1 = vk * (spread * d1 + k1 + drift)
            v2 = vk * (spread * d2 + k2 + drift)
            dphi = 0.5 * spread * (x2 - x1) * (2.0 * x - x1 - x2) \
                + (k1 - k2) * x \
                - 0.5 * vk * (k1 * k1 - k2 * k2) * ti \
                - 0.5 * g * (k1 - k2) * ti * ti
            cross = sqrt(rho1 * rho2)
            out[i] = nsq * (v1 * rho1 + v2 * rho2
                            + (u1 - u2) * cross * sin(dphi)
                            + (v1 + v2) * cross * cos(dphi))
    return out_arr
