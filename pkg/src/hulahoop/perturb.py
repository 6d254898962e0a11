"""First-order rotations for a slightly elliptic waist path.

Two regimes are covered.

*Moderate amplitudes.* With ellipticity ``eps`` small and ``gamma``, ``mu``
of order one, the stable rotation is approximated by

    phi(tau) = tau + phi0 + eps * (C sin(2 tau + phi0) + D cos(2 tau + phi0)),
    cos(phi0) = -gamma / mu,  sin(phi0) < 0.

*Small amplitudes.* With ``gamma``, ``eps`` and ``mu`` all small, rotation in
either direction is possible:

    rho = +1:  phi = tau + phi0 - (eps/4) cos(phi0 + 2 tau),  cos(phi0) = -gamma/mu
    rho = -1:  phi = -tau + phi0 + (mu/4) cos(phi0 - 2 tau), cos(phi0) = -gamma/eps

The counter-rotating phase is tied to ``eps``, which makes its existence
window ``0 < gamma < eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, InvalidParameter, NoRotatingSolution
from .model import State, clamped_arccos

DENOMINATOR_TOL = 1e-12


def _check_gamma_mu(gamma, mu):
    if gamma < 0:
        raise InvalidParameter("gamma", "must be non-negative")
    if gamma > mu:
        raise NoRotatingSolution(
            f"gamma = {gamma!r} exceeds mu = {mu!r}; rotation requires gamma <= mu"
        )


def phi0_stable(gamma: float, mu: float) -> float:
    """Phase of the stable zero-order rotation, in [-pi, -pi/2]."""
    if not mu > 0:
        raise InvalidParameter("mu", "must be positive")
    _check_gamma_mu(gamma, mu)
    return -clamped_arccos(-gamma / mu)


def _stiffness(gamma, mu):
    # max() absorbs round-off when gamma == mu
    return math.sqrt(max(mu * mu - gamma * gamma, 0.0))


def _cd_denominator(gamma, mu):
    return mu * mu + 3 * gamma * gamma - 8 * _stiffness(gamma, mu) + 16


def cd_coefficients(gamma: float, mu: float) -> tuple[float, float]:
    """Coefficients of the periodic first-order correction.

    They solve ``phi1'' + gamma phi1' + p phi1 = cos(2 tau + phi0)`` with
    ``p = sqrt(mu^2 - gamma^2)``.
    """
    _check_gamma_mu(gamma, mu)
    den = _cd_denominator(gamma, mu)
    if abs(den) < DENOMINATOR_TOL:
        raise DegenerateDenominator(f"denominator {den!r} vanishes at gamma={gamma!r}, mu={mu!r}")
    return 2 * gamma / den, (-4 + _stiffness(gamma, mu)) / den


@dataclass(frozen=True)
class FirstOrderSolution:
    phi0: float
    C: float
    D: float
    eps: float
    mu: float
    gamma: float

    rho = 1


def first_order_solution(gamma: float, eps: float, mu: float) -> FirstOrderSolution:
    C, D = cd_coefficients(gamma, mu)
    return FirstOrderSolution(phi0=phi0_stable(gamma, mu), C=C, D=D, eps=eps, mu=mu, gamma=gamma)


def eval_first_order(tau, sol: FirstOrderSolution) -> State:
    arg = 2 * tau + sol.phi0
    s, c = np.sin(arg), np.cos(arg)
    phi = tau + sol.phi0 + sol.eps * (sol.C * s + sol.D * c)
    phi_dot = 1 + sol.eps * (2 * sol.C * c - 2 * sol.D * s)
    return State(phi, phi_dot)


def first_order_residual(tau, sol: FirstOrderSolution):
    """Residual of the full rotating-frame equation along the approximation.

    Vanishes to first order in ``eps``; what remains is O(eps^2).
    """
    arg = 2 * tau + sol.phi0
    state = eval_first_order(tau, sol)
    phi_dd = -4 * sol.eps * (sol.C * np.sin(arg) + sol.D * np.cos(arg))
    return (
        phi_dd
        + sol.gamma * state.phi_dot
        + sol.mu * np.cos(state.phi - tau)
        - sol.eps * np.cos(state.phi + tau)
    )


def stability_bound_eps(gamma: float, mu: float) -> float:
    """Largest ellipticity free of parametric resonance at any stiffness."""
    if gamma < 0:
        raise InvalidParameter("gamma", "must be non-negative")
    C, D = cd_coefficients(gamma, mu)
    return 2 * gamma / math.sqrt((gamma * C + 1) ** 2 + (gamma * D) ** 2)


def contact_bound_eps(gamma: float, mu: float) -> float:
    """Largest ellipticity that keeps the first-order rotation on the waist."""
    _check_gamma_mu(gamma, mu)
    p = _stiffness(gamma, mu)
    num = mu * mu + 3 * gamma * gamma - 8 * p + 16
    den = mu * mu + 8 * gamma * gamma - 12 * p + 36
    return (1 + 2 * p) / 2 * math.sqrt(num / den)


@dataclass(frozen=True)
class SmallAmpSolution:
    rho: int
    phi0: float
    vib_amp: float
    gamma: float
    eps: float
    mu: float


def small_amp_solution(rho: int, gamma: float, eps: float, mu: float) -> SmallAmpSolution:
    if rho == 1:
        if not 0 < gamma < mu:
            raise NoRotatingSolution(
                f"co-rotation needs 0 < gamma < mu, got gamma={gamma!r}, mu={mu!r}"
            )
        return SmallAmpSolution(1, -clamped_arccos(-gamma / mu), 0.25, gamma, eps, mu)
    if rho == -1:
        if not 0 < gamma < eps:
            raise NoRotatingSolution(
                f"counter-rotation needs 0 < gamma < eps, got gamma={gamma!r}, eps={eps!r}"
            )
        return SmallAmpSolution(-1, clamped_arccos(-gamma / eps), mu / 4, gamma, eps, mu)
    raise InvalidParameter("rho", f"must be +1 or -1, got {rho!r}")


def eval_small_amp(tau, sol: SmallAmpSolution) -> State:
    if sol.rho == 1:
        # the gamma = mu = 0 corner of the moderate-amplitude correction
        limit = FirstOrderSolution(sol.phi0, 0.0, -0.25, sol.eps, sol.mu, sol.gamma)
        return eval_first_order(tau, limit)
    arg = sol.phi0 - 2 * tau
    phi = -tau + sol.phi0 + sol.vib_amp * np.cos(arg)
    phi_dot = -1 + 2 * sol.vib_amp * np.sin(arg)
    return State(phi, phi_dot)


def small_amp_residual(tau, sol: SmallAmpSolution):
    """Residual of the rotating-frame equation along a small-amplitude rotation."""
    state = eval_small_amp(tau, sol)
    if sol.rho == 1:
        phi_dd = sol.eps * np.cos(2 * tau + sol.phi0)
    else:
        phi_dd = -4 * sol.vib_amp * np.cos(sol.phi0 - 2 * tau)
    return (
        phi_dd
        + sol.gamma * state.phi_dot
        + sol.mu * np.cos(state.phi - tau)
        - sol.eps * np.cos(state.phi + tau)
    )


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    value: float
    bound: float


def small_amp_contact_bound(rho: int, gamma: float, eps: float, mu: float) -> BoundCheck:
    """Contact condition for the small-amplitude rotations.

    Co-rotation bounds ``eps``; counter-rotation bounds ``mu``.
    """
    if rho == 1:
        bound = (1 + 2 * _stiffness(gamma, mu)) / 3
        return BoundCheck(eps < bound, eps, bound)
    if rho == -1:
        bound = (1 + 2 * _stiffness(gamma, eps)) / 3
        return BoundCheck(mu < bound, mu, bound)
    raise InvalidParameter("rho", f"must be +1 or -1, got {rho!r}")
