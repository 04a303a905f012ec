"""Numpy fallback for the compiled transport kernel.

Same contract as the Cython module: RK4 endpoint of a geodesic on a
registry chart, with the conformal profile evaluated in closed form.
kind 0 is flat, 1 the gaussian profile, 2 the sine profile; eps, width
and center parameterize omega = 1 + eps f as in transport._profile.
"""

import numpy as np

_ETA_SIGN = np.array([1.0, -1.0, -1.0, -1.0])


def _accel(kind, eps, width, center, x, v):
    if kind == 0:
        return np.zeros(4)
    d = x - center
    if kind == 1:
        f = np.exp(-(d @ d) / width ** 2)
        grad = f * (-2.0 / width ** 2) * d
    else:
        d = d / width
        s, c = np.sin(d), np.cos(d)
        f = s[0] * c[1] * c[2] * c[3]
        grad = np.array([c[0] * c[1] * c[2] * c[3],
                         -s[0] * s[1] * c[2] * c[3],
                         -s[0] * c[1] * s[2] * c[3],
                         -s[0] * c[1] * c[2] * s[3]]) / width
    w = eps * grad / (1.0 + eps * f)
    wv = w @ v
    nv = v[0] ** 2 - v[1] ** 2 - v[2] ** 2 - v[3] ** 2
    return -2.0 * wv * v + nv * _ETA_SIGN * w


def shoot_endpoint(kind, eps, width, center, lo, hi, p, v, s_end, steps):
    """Endpoint (x, v, status) of the RK4 geodesic from (p, v).

    status is 0 on success and i when step i (1-based) left the box
    [lo, hi]; on exit x holds the offending point.
    """
    h = s_end / steps
    x = np.array(p, dtype=float)
    u = np.array(v, dtype=float)
    center = np.asarray(center, dtype=float)
    for i in range(steps):
        k1v = _accel(kind, eps, width, center, x, u)
        k2x = u + 0.5 * h * k1v
        k2v = _accel(kind, eps, width, center, x + 0.5 * h * u, k2x)
        k3x = u + 0.5 * h * k2v
        k3v = _accel(kind, eps, width, center, x + 0.5 * h * k2x, k3x)
        k4x = u + h * k3v
        k4v = _accel(kind, eps, width, center, x + h * k3x, k4x)
        x = x + (h / 6.0) * (u + 2.0 * k2x + 2.0 * k3x + k4x)
        u = u + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if np.any(x < lo) or np.any(x > hi):
            return x, u, i + 1
    return x, u, 0
