# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled transport kernel: RK4 geodesic endpoints on registry charts.

Mirrors conerec._kernels_py.shoot_endpoint; the conformal connection is
evaluated in closed form from the profile parameters so the whole step
loop runs without Python objects.
"""

from libc.math cimport exp, sin, cos

import numpy as np


cdef inline void _accel(int kind, double eps, double width,
                        const double* c, const double* x, const double* v,
                        double* out) noexcept nogil:
    cdef double d0, d1, d2, d3, f, s, wv, nv, denom
    cdef double g[4]
    cdef double w[4]
    cdef int a
    if kind == 0:
        for a in range(4):
            out[a] = 0.0
        return
    d0 = x[0] - c[0]
    d1 = x[1] - c[1]
    d2 = x[2] - c[2]
    d3 = x[3] - c[3]
    if kind == 1:
        f = exp(-(d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3) / (width * width))
        s = f * (-2.0 / (width * width))
        g[0] = s * d0
        g[1] = s * d1
        g[2] = s * d2
        g[3] = s * d3
    else:
        d0 /= width
        d1 /= width
        d2 /= width
        d3 /= width
        f = sin(d0) * cos(d1) * cos(d2) * cos(d3)
        g[0] = cos(d0) * cos(d1) * cos(d2) * cos(d3) / width
        g[1] = -sin(d0) * sin(d1) * cos(d2) * cos(d3) / width
        g[2] = -sin(d0) * cos(d1) * sin(d2) * cos(d3) / width
        g[3] = -sin(d0) * cos(d1) * cos(d2) * sin(d3) / width
    denom = 1.0 + eps * f
    for a in range(4):
        w[a] = eps * g[a] / denom
    wv = w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3]
    nv = v[0] * v[0] - v[1] * v[1] - v[2] * v[2] - v[3] * v[3]
    out[0] = -2.0 * wv * v[0] + nv * w[0]
    out[1] = -2.0 * wv * v[1] - nv * w[1]
    out[2] = -2.0 * wv * v[2] - nv * w[2]
    out[3] = -2.0 * wv * v[3] - nv * w[3]


def shoot_endpoint(int kind, double eps, double width,
                   double[::1] center, double[::1] lo, double[::1] hi,
                   double[::1] p, double[::1] v, double s_end, int steps):
    """Endpoint (x, v, status) of the RK4 geodesic from (p, v).

    status is 0 on success and i when step i (1-based) left the box
    [lo, hi]; on exit x holds the offending point.
    """
    cdef double h = s_end / steps
    cdef double x[4]
    cdef double u[4]
    cdef double k1v[4]
    cdef double k2x[4]
    cdef double k2v[4]
    cdef double k3x[4]
    cdef double k3v[4]
    cdef double k4x[4]
    cdef double k4v[4]
    cdef double tmp[4]
    cdef int i, a, status = 0
    for a in range(4):
        x[a] = p[a]
        u[a] = v[a]
    with nogil:
        for i in range(steps):
            _accel(kind, eps, width, &center[0], x, u, k1v)
            for a in range(4):
                k2x[a] = u[a] + 0.5 * h * k1v[a]
                tmp[a] = x[a] + 0.5 * h * u[a]
            _accel(kind, eps, width, &center[0], tmp, k2x, k2v)
            for a in range(4):
                k3x[a] = u[a] + 0.5 * h * k2v[a]
                tmp[a] = x[a] + 0.5 * h * k2x[a]
            _accel(kind, eps, width, &center[0], tmp, k3x, k3v)
            for a in range(4):
                k4x[a] = u[a] + h * k3v[a]
                tmp[a] = x[a] + h * k3x[a]
            _accel(kind, eps, width, &center[0], tmp, k4x, k4v)
            for a in range(4):
                x[a] = x[a] + (h / 6.0) * (u[a] + 2.0 * k2x[a]
                                           + 2.0 * k3x[a] + k4x[a])
                u[a] = u[a] + (h / 6.0) * (k1v[a] + 2.0 * k2v[a]
                                           + 2.0 * k3v[a] + k4v[a])
            for a in range(4):
                if x[a] < lo[a] or x[a] > hi[a]:
                    status = i + 1
                    break
            if status:
                break
    x_out = np.empty(4)
    u_out = np.empty(4)
    for a in range(4):
        x_out[a] = x[a]
        u_out[a] = u[a]
    return x_out, u_out, status
