import cmath
import math

import numpy as np
import pytest

from hulahoop.errors import BracketFailure, DeterminantDrift, InvalidParameter
from hulahoop.perturb import stability_bound_eps
from hulahoop.stability import (
    FloquetVerdict,
    MathieuHill,
    assemble_hill,
    classify,
    floquet_classify,
    monodromy,
    numeric_eps_critical,
)


def constant_coefficient_multipliers(gamma, p):
    """Period-pi multipliers of u'' + gamma u' + p u = 0 from its characteristic roots."""
    disc = cmath.sqrt(gamma * gamma - 4 * p)
    return sorted((cmath.exp((-gamma + disc) / 2 * math.pi), cmath.exp((-gamma - disc) / 2 * math.pi)),
                  key=lambda z: (z.real, z.imag))


def test_assemble():
    h = assemble_hill(0.0, 0.3, 0.0)
    assert h.p == pytest.approx(0.3, abs=1e-16)
    assert assemble_hill(0.2, 0.3, 0.1).p == pytest.approx(math.sqrt(0.05), abs=1e-15)
    assert assemble_hill(0.2, 0.2, 0.1).p == 0.0


def test_modulation_has_period_pi():
    h = assemble_hill(0.2, 0.3, 0.1)
    tau = np.linspace(0, 7, 300)
    np.testing.assert_allclose(h.modulation(tau + math.pi), h.modulation(tau), atol=1e-14)
    assert np.abs(h.modulation(tau + math.pi / 2) + h.modulation(tau)).max() < 1e-14


@pytest.mark.parametrize("mu", [0.05, 0.3, 0.9])
def test_undamped_constant_coefficients(mu):
    h = assemble_hill(0.0, mu, 0.0)
    rep = floquet_classify(monodromy(h), 0.0)
    w = math.sqrt(h.p)
    np.testing.assert_allclose(
        sorted(rep.multipliers, key=lambda z: (z.real, z.imag)),
        sorted([cmath.exp(1j * w * math.pi), cmath.exp(-1j * w * math.pi)], key=lambda z: (z.real, z.imag)),
        atol=1e-10,
    )
    assert rep.determinant == pytest.approx(1.0, abs=1e-12)
    assert rep.verdict is FloquetVerdict.MARGINAL


def test_damped_constant_coefficients():
    h = MathieuHill(gamma=0.1, p=0.03, eps=0.0, phi0=-1.0, C=0.0, D=0.0)
    rep = floquet_classify(monodromy(h), 0.1)
    assert rep.determinant == pytest.approx(math.exp(-0.1 * math.pi), abs=1e-10)
    assert math.exp(-0.1 * math.pi) == pytest.approx(0.730403, abs=1e-6)
    np.testing.assert_allclose(
        sorted(rep.multipliers, key=lambda z: (z.real, z.imag)),
        constant_coefficient_multipliers(0.1, 0.03),
        atol=1e-10,
    )
    assert rep.verdict is FloquetVerdict.STABLE


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.5, 1.5])
def test_liouville_independent_of_eps(eps):
    M = monodromy(assemble_hill(0.2, 0.3, eps))
    assert np.linalg.det(M) == pytest.approx(math.exp(-0.2 * math.pi), abs=1e-8)
    assert math.exp(-0.2 * math.pi) == pytest.approx(0.533488, abs=1e-6)


def test_identity_is_marginal():
    rep = floquet_classify(np.eye(2), 0.0)
    assert rep.multipliers == (1, 1)
    assert rep.verdict is FloquetVerdict.MARGINAL


def test_drift_detected():
    with pytest.raises(DeterminantDrift):
        floquet_classify(np.eye(2), 0.1)


def test_step_must_resolve_period():
    with pytest.raises(InvalidParameter):
        monodromy(assemble_hill(0.2, 0.3, 0.1), step=0.01)


@pytest.mark.parametrize("gamma,mu", [(0.0, 0.3), (0.1, 0.3), (0.2, 0.2), (0.05, 0.2), (0.3, 0.9)])
def test_eps_zero_matches_closed_form(gamma, mu):
    rep = classify(gamma, mu, 0.0)
    p = math.sqrt(max(mu * mu - gamma * gamma, 0.0))
    expected = FloquetVerdict.STABLE if gamma > 0 and p > 0 else FloquetVerdict.MARGINAL
    assert rep.verdict is expected
    np.testing.assert_allclose(
        sorted(rep.multipliers, key=lambda z: (z.real, z.imag)),
        constant_coefficient_multipliers(gamma, p),
        atol=1e-9,
    )


@pytest.mark.parametrize("gamma,mu,eps", [(0.2, 0.3, 0.1), (0.05, 0.2, 1.0), (0.2, 0.3, 1.6), (0.1, 0.5, 0.4)])
def test_step_halving_moves_multipliers_little(gamma, mu, eps):
    h = assemble_hill(gamma, mu, eps)
    a = floquet_classify(monodromy(h, math.pi / 2000), gamma).multipliers
    b = floquet_classify(monodromy(h, math.pi / 4000), gamma).multipliers
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-7


def test_large_eps_goes_unstable():
    assert classify(0.05, 0.2, 2.0).verdict is FloquetVerdict.UNSTABLE


def test_critical_eps_bisection_contract():
    tol = 1e-3
    crit = numeric_eps_critical(0.2, 0.3, tol)
    assert classify(0.2, 0.3, crit).verdict is FloquetVerdict.UNSTABLE
    assert classify(0.2, 0.3, crit - tol).verdict is not FloquetVerdict.UNSTABLE
    for eps in np.linspace(0, crit - tol, 12):
        assert classify(0.2, 0.3, eps).verdict is FloquetVerdict.STABLE


def test_bracket_failure_reported():
    # the default bracket reaches only 4x the analytic bound, ~0.4 here
    with pytest.raises(BracketFailure):
        numeric_eps_critical(0.05, 0.2)


@pytest.mark.parametrize("gamma,mu", [(0.05, 0.2), (0.1, 0.2), (0.2, 0.3), (0.02, 0.15625), (0.3, 0.8)])
def test_analytic_bound_is_sufficient(gamma, mu):
    numeric = numeric_eps_critical(gamma, mu, 1e-3, upper=4.0)
    assert numeric >= stability_bound_eps(gamma, mu)


# The statements below are false for the Hill equation as assembled: its
# natural frequency sqrt(p) stays far from the principal resonance at 1, so
# instability sets in only near eps ~ 1.5 while the all-frequency bound is
# 0.1 to 0.4. Kept as strict xfails so a change in behaviour is noticed.

@pytest.mark.xfail(strict=True, reason="eps = 2x analytic bound (~0.2) is still Floquet-stable")
def test_twice_analytic_bound_is_unstable():
    eps = 2 * stability_bound_eps(0.05, 0.2)
    assert classify(0.05, 0.2, eps).verdict is FloquetVerdict.UNSTABLE


@pytest.mark.xfail(strict=True, reason="numeric boundary ~1.49-1.6 vs analytic 0.1-0.4")
@pytest.mark.parametrize("gamma,mu", [(0.05, 0.2), (0.1, 0.2), (0.2, 0.3)])
def test_numeric_boundary_within_20_percent(gamma, mu):
    analytic = stability_bound_eps(gamma, mu)
    numeric = numeric_eps_critical(gamma, mu, 1e-3, upper=4.0)
    assert abs(numeric - analytic) <= 0.2 * analytic
