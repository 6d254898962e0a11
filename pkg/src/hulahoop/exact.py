"""Uniform rotations of the hoop under circular excitation (alpha == beta).

For a circular waist path the hoop can rotate in lock-step with the
excitation, ``phi = tau + psi`` with ``cos(psi) = -gamma/alpha``. Two phase
families exist; the one with ``sin(psi) < 0`` is the stable one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameter, NoRotatingSolution, NotASolution
from .model import clamped_arccos

SOLUTION_TOL = 1e-9
# |sin psi| below this counts as the degenerate gamma == alpha case
SIN_ZERO_TOL = 1e-12


class Branch(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


class Verdict(str, Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class ExactBranch:
    psi: float
    branch: Branch
    k_offset: int = 0

    @property
    def rho(self) -> int:
        return 1

    def phase(self, tau):
        return tau + self.psi + 2 * math.pi * self.k_offset


@dataclass(frozen=True)
class ExactPhases:
    stable: ExactBranch
    unstable: ExactBranch


@dataclass(frozen=True)
class LinearizedSpectrum:
    eigenvalues: tuple[complex, complex]
    verdict: Verdict


@dataclass(frozen=True)
class ContactCheck:
    ok: bool
    margin: float


def exact_phases(gamma: float, alpha: float) -> ExactPhases:
    if not alpha > 0:
        raise InvalidParameter("alpha", "must be positive; normalize the parameters first")
    if abs(gamma) > abs(alpha):
        raise NoRotatingSolution(
            f"|gamma| = {abs(gamma)!r} exceeds |alpha| = {abs(alpha)!r}; "
            "uniform rotation requires |gamma| <= |alpha|"
        )
    angle = clamped_arccos(-gamma / alpha)
    return ExactPhases(
        stable=ExactBranch(-angle, Branch.STABLE),
        unstable=ExactBranch(angle, Branch.UNSTABLE),
    )


def exact_stability(gamma: float, alpha: float, psi: float) -> LinearizedSpectrum:
    """Linear stability of ``phi = tau + psi`` via Routh-Hurwitz.

    Small deviations obey ``eta'' + gamma eta' - alpha sin(psi) eta = 0``.
    For a monic quadratic both roots lie in the open left half-plane iff
    both lower coefficients are positive.
    """
    if alpha == 0:
        raise InvalidParameter("alpha", "must be non-zero")
    if abs(math.cos(psi) + gamma / alpha) > SOLUTION_TOL:
        raise NotASolution(f"cos(psi) = {math.cos(psi)!r} but -gamma/alpha = {-gamma / alpha!r}")

    a1 = gamma
    a0 = -alpha * math.sin(psi)
    if abs(a0) <= SIN_ZERO_TOL * abs(alpha):
        a0 = 0.0
    disc = cmath.sqrt(a1 * a1 - 4 * a0)
    roots = ((-a1 + disc) / 2, (-a1 - disc) / 2)

    if a1 < 0 or a0 < 0:
        verdict = Verdict.UNSTABLE
    elif a1 > 0 and a0 > 0:
        verdict = Verdict.ASYMPTOTICALLY_STABLE
    else:
        verdict = Verdict.MARGINAL
    return LinearizedSpectrum(eigenvalues=roots, verdict=verdict)


def exact_contact_ok(alpha: float, psi: float) -> ContactCheck:
    # the contact margin is constant along phi = tau + psi when alpha == beta
    margin = 1 - 2 * alpha * math.sin(psi)
    return ContactCheck(ok=margin > 0, margin=margin)
