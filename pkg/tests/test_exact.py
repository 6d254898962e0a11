import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hulahoop import sim
from hulahoop.errors import InvalidParameter, NoRotatingSolution, NotASolution
from hulahoop.exact import (
    Branch,
    Verdict,
    exact_contact_ok,
    exact_phases,
    exact_stability,
)
from hulahoop.model import Params, State


def test_undamped_phases():
    ph = exact_phases(0.0, 0.2)
    assert ph.stable.psi == -math.pi / 2
    assert ph.unstable.psi == math.pi / 2
    assert ph.stable.branch is Branch.STABLE and ph.unstable.branch is Branch.UNSTABLE


def test_damped_phase():
    ph = exact_phases(0.1, 0.2)
    assert ph.stable.psi == pytest.approx(-2 * math.pi / 3, abs=1e-15)
    assert ph.unstable.psi == pytest.approx(2 * math.pi / 3, abs=1e-15)


def test_no_solution_when_damping_exceeds_drive():
    with pytest.raises(NoRotatingSolution):
        exact_phases(0.3, 0.2)


def test_alpha_must_be_normalized():
    with pytest.raises(InvalidParameter):
        exact_phases(0.1, -0.2)


def _roots(gamma, alpha, psi):
    return sorted(np.roots([1.0, gamma, -alpha * math.sin(psi)]), key=lambda z: (z.real, z.imag))


def test_stable_spectrum():
    psi = -2 * math.pi / 3
    spectrum = exact_stability(0.1, 0.2, psi)
    assert spectrum.verdict is Verdict.ASYMPTOTICALLY_STABLE
    got = sorted(spectrum.eigenvalues, key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, _roots(0.1, 0.2, psi), atol=1e-14)
    assert got[0].real == pytest.approx(-0.05, abs=1e-15)
    assert abs(got[0].imag) == pytest.approx(math.sqrt(0.2 * math.sqrt(3) / 2 - 0.0025), abs=1e-14)


def test_unstable_spectrum():
    spectrum = exact_stability(0.1, 0.2, 2 * math.pi / 3)
    assert spectrum.verdict is Verdict.UNSTABLE
    reals = sorted(z.real for z in spectrum.eigenvalues)
    assert reals[1] > 0 and reals[0] < 0
    np.testing.assert_allclose(sorted(spectrum.eigenvalues, key=lambda z: z.real), _roots(0.1, 0.2, 2 * math.pi / 3), atol=1e-14)


def test_undamped_is_marginal():
    spectrum = exact_stability(0.0, 0.2, -math.pi / 2)
    assert spectrum.verdict is Verdict.MARGINAL
    for z in spectrum.eigenvalues:
        assert z.real == 0
        assert abs(z.imag) == pytest.approx(math.sqrt(0.2), abs=1e-15)


def test_gamma_equal_alpha_is_marginal():
    ph = exact_phases(0.2, 0.2)
    assert ph.stable.psi == -math.pi
    assert exact_stability(0.2, 0.2, ph.stable.psi).verdict is Verdict.MARGINAL


def test_negative_damping_destabilizes_both():
    ph = exact_phases(-0.1, 0.2)
    for b in (ph.stable, ph.unstable):
        assert exact_stability(-0.1, 0.2, b.psi).verdict is Verdict.UNSTABLE


def test_not_a_solution():
    with pytest.raises(NotASolution):
        exact_stability(0.1, 0.2, -math.pi / 2)


@settings(max_examples=300, deadline=None)
@given(
    gamma=st.floats(-1, 1),
    alpha=st.floats(0.01, 1),
    which=st.sampled_from(["stable", "unstable"]),
)
def test_routh_hurwitz_matches_eigenvalues(gamma, alpha, which):
    if abs(gamma) > alpha:
        return
    b = getattr(exact_phases(gamma, alpha), which)
    spectrum = exact_stability(gamma, alpha, b.psi)
    top = max(z.real for z in spectrum.eigenvalues)
    if spectrum.verdict is Verdict.ASYMPTOTICALLY_STABLE:
        assert top < 0
    elif spectrum.verdict is Verdict.UNSTABLE:
        assert top > 0
    else:
        assert abs(top) < 1e-6


@pytest.mark.parametrize(
    "alpha,psi,margin,ok",
    [(0.2, -math.pi / 2, 1.4, True), (0.2, math.pi / 2, 0.6, True), (0.6, math.pi / 2, -0.2, False)],
)
def test_contact(alpha, psi, margin, ok):
    c = exact_contact_ok(alpha, psi)
    assert c.margin == pytest.approx(margin, abs=1e-15)
    assert c.ok is ok


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.001, 2), frac=st.floats(0, 1))
def test_stable_phase_interval_and_contact(alpha, frac):
    gamma = frac * alpha
    psi = exact_phases(gamma, alpha).stable.psi
    assert -math.pi <= psi <= -math.pi / 2
    if 0 < gamma < alpha:
        c = exact_contact_ok(alpha, psi)
        assert c.ok and c.margin > 1


@pytest.mark.parametrize("gamma,alpha", [(0.05, 0.1), (0.1, 0.2), (0.3, 0.45), (0.01, 0.5)])
def test_uniform_rotation_solves_equation(gamma, alpha):
    tau = np.linspace(0, 20 * math.pi, 20001)
    for b in (exact_phases(gamma, alpha).stable, exact_phases(gamma, alpha).unstable):
        residual = gamma * 1.0 + alpha * np.cos(b.phase(tau) - tau)
        assert np.abs(residual).max() < 1e-12


def test_verdicts_agree_with_simulation():
    p = Params(0.1, 0.2, 0.2)
    ph = exact_phases(0.1, 0.2)
    t = sim.integrate(p, State(ph.stable.psi + 0.3, 1.0), 300)
    tail = t.tau > t.tau[-1] - 20 * math.pi
    assert np.abs(t.phi[tail] - t.tau[tail] - ph.stable.psi).max() < 1e-4

    t = sim.integrate(p, State(ph.unstable.psi + 1e-6, 1.0), 300)
    assert np.abs(sim.wrap(t.phi - t.tau - ph.unstable.psi)).max() > 0.1
