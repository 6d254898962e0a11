"""Floquet analysis of the variational equation about the elliptic rotation.

Small deviations ``u`` from the first-order rotation satisfy a damped
Mathieu-Hill equation

    u'' + gamma u' + [p + eps * Phi(2 tau)] u = 0,
    p = sqrt(mu^2 - gamma^2),
    Phi = (gamma C + 1) sin(2 tau + phi0) + gamma D cos(2 tau + phi0).

The coefficient has period pi in ``tau``, so the monodromy matrix is taken
over pi. Integrating over 2 pi instead would square every multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import perturb
from ._kernels import rk4_hill_monodromy
from .errors import BracketFailure, DeterminantDrift, InvalidParameter

PERIOD = math.pi
MIN_SUBSTEPS = 1000
DEFAULT_STEP = PERIOD / 2000
MULTIPLIER_TOL = 1e-9
DRIFT_TOL = 1e-6


class FloquetVerdict(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class MathieuHill:
    gamma: float
    p: float
    eps: float
    phi0: float
    C: float
    D: float

    def modulation(self, tau):
        arg = 2 * tau + self.phi0
        return (self.gamma * self.C + 1) * np.sin(arg) + self.gamma * self.D * np.cos(arg)

    def stiffness(self, tau):
        return self.p + self.eps * self.modulation(tau)


@dataclass(frozen=True)
class FloquetReport:
    multipliers: tuple[complex, complex]
    determinant: float
    verdict: FloquetVerdict


def assemble_hill(gamma: float, mu: float, eps: float) -> MathieuHill:
    phi0 = perturb.phi0_stable(gamma, mu)
    C, D = perturb.cd_coefficients(gamma, mu)
    p = math.sqrt(max(mu * mu - gamma * gamma, 0.0))
    return MathieuHill(gamma=gamma, p=p, eps=eps, phi0=phi0, C=C, D=D)


def substeps(step: float) -> int:
    n = math.ceil(PERIOD / step - 1e-9)
    if n < MIN_SUBSTEPS:
        raise InvalidParameter("step", f"gives {n} substeps per period, need at least {MIN_SUBSTEPS}")
    return n


def monodromy(h: MathieuHill, step: float = DEFAULT_STEP) -> np.ndarray:
    """Period-pi map of (u, u'); column j starts from the j-th unit vector."""
    n = substeps(step)
    return rk4_hill_monodromy(
        h.gamma, h.p, h.eps, h.phi0, h.gamma * h.C + 1, h.gamma * h.D, PERIOD, n
    )


def floquet_classify(M: np.ndarray, gamma: float) -> FloquetReport:
    det = float(np.linalg.det(M))
    expected = math.exp(-gamma * PERIOD)
    if abs(det - expected) > DRIFT_TOL:
        raise DeterminantDrift(f"det(M) = {det!r}, Liouville value {expected!r}")
    mult = np.linalg.eigvals(M).astype(complex)
    mult = tuple(sorted(mult, key=lambda z: (z.real, z.imag)))
    mags = [abs(z) for z in mult]
    if max(mags) > 1 + MULTIPLIER_TOL:
        verdict = FloquetVerdict.UNSTABLE
    elif max(mags) < 1 - MULTIPLIER_TOL:
        verdict = FloquetVerdict.STABLE
    else:
        verdict = FloquetVerdict.MARGINAL
    return FloquetReport(multipliers=mult, determinant=det, verdict=verdict)


def classify(gamma: float, mu: float, eps: float, step: float = DEFAULT_STEP) -> FloquetReport:
    return floquet_classify(monodromy(assemble_hill(gamma, mu, eps), step), gamma)


def numeric_eps_critical(
    gamma: float,
    mu: float,
    tolerance: float = 1e-3,
    step: float = DEFAULT_STEP,
    upper: float | None = None,
) -> float:
    """Smallest ellipticity at which the Floquet verdict turns Unstable.

    Bisects on ``[0, upper]``; ``upper`` defaults to four times the analytic
    all-frequency bound. The returned value is the unstable end of the final
    bracket, which is narrower than ``tolerance``.
    """
    if not 0 < gamma < mu:
        raise InvalidParameter("gamma", "bisection needs 0 < gamma < mu")
    if upper is None:
        upper = 4 * perturb.stability_bound_eps(gamma, mu)

    def unstable(eps):
        return classify(gamma, mu, eps, step).verdict is FloquetVerdict.UNSTABLE

    lo, hi = 0.0, upper
    if unstable(lo) or not unstable(hi):
        raise BracketFailure(
            f"verdict does not flip on eps in [0, {hi!r}] for gamma={gamma!r}, mu={mu!r}"
        )
    while hi - lo >= tolerance:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return hi
