"""Hoop on an elliptically driven waist: parameters, equation of motion, contact.

The waist centre follows ``x = a sin(wt)``, ``y = b cos(wt)``. After scaling
time by ``tau = w t`` the hoop angle obeys

    phi'' + gamma phi' + alpha sin(tau) sin(phi) + beta cos(tau) cos(phi) = 0

and stays on the waist while the contact margin

    phi'^2 + 2 (alpha sin(tau) cos(phi) - beta cos(tau) sin(phi))

is positive. The same equation written with ``eps = (alpha - beta)/2`` and
``mu = (alpha + beta)/2`` reads

    phi'' + gamma phi' + mu cos(phi - tau) = eps cos(phi + tau).

All functions here accept NumPy arrays as well as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter

ARCCOS_CLAMP = 1e-12


def _require_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameter(name, f"must be finite, got {value!r}")


def clamped_arccos(x: float) -> float:
    """arccos that forgives round-off of up to 1e-12 past +-1."""
    if abs(x) > 1.0 + ARCCOS_CLAMP:
        raise ValueError(f"arccos argument {x!r} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, x)))


@dataclass(frozen=True)
class DimensionalParams:
    """Physical constants of hoop, waist and excitation (SI units).

    m: hoop mass [kg]; R: hoop radius [m]; r: waist radius [m];
    k: viscous friction coefficient [N m s]; a, b: waist-centre amplitudes
    along x and y [m]; omega: excitation frequency [rad/s].
    """

    m: float
    R: float
    r: float
    k: float
    a: float
    b: float
    omega: float

    def __post_init__(self):
        _require_finite(m=self.m, R=self.R, r=self.r, k=self.k, a=self.a, b=self.b, omega=self.omega)
        if self.m <= 0:
            raise InvalidParameter("m", "hoop mass must be positive")
        if self.r <= 0:
            raise InvalidParameter("r", "waist radius must be positive")
        if self.R <= self.r:
            raise InvalidParameter("R", "hoop radius must exceed waist radius")
        if self.k < 0:
            raise InvalidParameter("k", "friction coefficient must be non-negative")
        if self.omega <= 0:
            raise InvalidParameter("omega", "excitation frequency must be positive")


@dataclass(frozen=True)
class Params:
    """Nondimensional damping ``gamma`` and amplitudes ``alpha``, ``beta``."""

    gamma: float
    alpha: float
    beta: float

    def __post_init__(self):
        _require_finite(gamma=self.gamma, alpha=self.alpha, beta=self.beta)

    @property
    def eps(self) -> float:
        return (self.alpha - self.beta) / 2

    @property
    def mu(self) -> float:
        return (self.alpha + self.beta) / 2

    @classmethod
    def from_rotating(cls, gamma: float, eps: float, mu: float) -> "Params":
        return cls(gamma=gamma, alpha=mu + eps, beta=mu - eps)


@dataclass(frozen=True)
class State:
    """Unwrapped hoop angle and its rate with respect to ``tau``."""

    phi: float
    phi_dot: float


@dataclass(frozen=True)
class Forces:
    normal: float
    friction: float
    theta_dot: float


def nondimensionalize(p: DimensionalParams) -> Params:
    gap = p.R - p.r
    return Params(
        gamma=p.k / (2 * p.m * p.R**2 * p.omega),
        alpha=p.a / (2 * gap),
        beta=p.b / (2 * gap),
    )


def normalize(p: Params) -> tuple[Params, float]:
    """Map ``alpha < 0`` onto ``alpha > 0`` by shifting time by pi.

    Returns the normalized parameters and the shift ``s`` such that the
    original solution at ``tau`` equals the normalized one at ``tau + s``.
    """
    if p.alpha >= 0:
        return p, 0.0
    return Params(p.gamma, -p.alpha, -p.beta), math.pi


def rhs(tau, s: State, p: Params):
    """Angular acceleration in the lab-axis form."""
    return (
        -p.gamma * s.phi_dot
        - p.alpha * np.sin(tau) * np.sin(s.phi)
        - p.beta * np.cos(tau) * np.cos(s.phi)
    )


def rhs_rotating(tau, s: State, gamma, eps, mu):
    """Angular acceleration written with mean amplitude and ellipticity."""
    return -gamma * s.phi_dot - mu * np.cos(s.phi - tau) + eps * np.cos(s.phi + tau)


def contact_margin(tau, s: State, p: Params):
    """Scaled normal force; positive while the hoop presses on the waist."""
    return s.phi_dot**2 + 2 * (
        p.alpha * np.sin(tau) * np.cos(s.phi) - p.beta * np.cos(tau) * np.sin(s.phi)
    )


def dimensional_forces(t: float, s: State, p: DimensionalParams) -> Forces:
    """Normal force, friction force and spin rate for a no-slip hoop.

    ``s`` is given in physical time: ``s.phi_dot`` is dphi/dt in rad/s.
    The angular acceleration comes from the reduced equation of motion and
    the friction force from the spin balance about the hoop centre.
    """
    gap = p.R - p.r
    w = p.omega
    x_dd = -p.a * w**2 * math.sin(w * t)
    y_dd = -p.b * w**2 * math.cos(w * t)
    sin_phi, cos_phi = math.sin(s.phi), math.cos(s.phi)

    normal = p.m * gap * s.phi_dot**2 - p.m * (x_dd * cos_phi - y_dd * sin_phi)
    phi_dd = (x_dd * sin_phi + y_dd * cos_phi) / (2 * gap) - p.k * s.phi_dot / (2 * p.m * p.R**2)
    theta_dot = gap * s.phi_dot / p.R
    theta_dd = gap * phi_dd / p.R
    friction = -(p.m * p.R**2 * theta_dd + p.k * theta_dot) / p.R
    return Forces(normal=normal, friction=friction, theta_dot=theta_dot)
