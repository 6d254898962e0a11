"""JIT-compiled classical RK4 loops.

Both kernels use the same fixed-step four-stage scheme. Stage times are
computed as ``tau0 + i*h`` rather than accumulated, so runs are bit-for-bit
reproducible and sample times are exact multiples of the step.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _accel(t, x, v, gamma, alpha, beta):
    return -gamma * v - alpha * math.sin(t) * math.sin(x) - beta * math.cos(t) * math.cos(x)


@njit(cache=True)
def rk4_hoop(phi, phi_dot, tau0, h, n_steps, stride, gamma, alpha, beta, out_phi, out_dot):
    """Integrate the hoop equation, writing every ``stride``-th state.

    Returns the number of samples written. A short count means the state
    stopped being finite; the last written sample is the last good one.
    """
    x = phi
    v = phi_dot
    out_phi[0] = x
    out_dot[0] = v
    written = 1
    half = 0.5 * h
    for i in range(n_steps):
        t = tau0 + i * h
        k1x = v
        k1v = _accel(t, x, v, gamma, alpha, beta)
        k2x = v + half * k1v
        k2v = _accel(t + half, x + half * k1x, k2x, gamma, alpha, beta)
        k3x = v + half * k2v
        k3v = _accel(t + half, x + half * k2x, k3x, gamma, alpha, beta)
        k4x = v + h * k3v
        k4v = _accel(t + h, x + h * k3x, k4x, gamma, alpha, beta)
        x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (math.isfinite(x) and math.isfinite(v)):
            return written
        if (i + 1) % stride == 0:
            out_phi[written] = x
            out_dot[written] = v
            written += 1
    return written


@njit(cache=True)
def _hill_accel(t, u, w, gamma, p, eps, phi0, a_sin, a_cos):
    arg = 2.0 * t + phi0
    k = p + eps * (a_sin * math.sin(arg) + a_cos * math.cos(arg))
    return -gamma * w - k * u


@njit(cache=True)
def rk4_hill_monodromy(gamma, p, eps, phi0, a_sin, a_cos, period, n_steps):
    """Fundamental matrix of the damped Hill equation after one period."""
    h = period / n_steps
    half = 0.5 * h
    m = np.empty((2, 2))
    for col in range(2):
        u = 1.0 if col == 0 else 0.0
        w = 0.0 if col == 0 else 1.0
        for i in range(n_steps):
            t = i * h
            k1u = w
            k1w = _hill_accel(t, u, w, gamma, p, eps, phi0, a_sin, a_cos)
            k2u = w + half * k1w
            k2w = _hill_accel(t + half, u + half * k1u, k2u, gamma, p, eps, phi0, a_sin, a_cos)
            k3u = w + half * k2w
            k3w = _hill_accel(t + half, u + half * k2u, k3u, gamma, p, eps, phi0, a_sin, a_cos)
            k4u = w + h * k3w
            k4w = _hill_accel(t + h, u + h * k3u, k4u, gamma, p, eps, phi0, a_sin, a_cos)
            u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        m[0, col] = u
        m[1, col] = w
    return m
