import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gaussbohm.analytic import (AnalyticCase, Focus, Regime, SingularCollapse,
                                bohmian_trajectory_closed_form, characteristic_time,
                                focal_factor, free_classical, free_general_alpha, free_linear,
                                free_linear_state, harmonic_classical, harmonic_linear,
                                squeezed_extremes)
from gaussbohm.core import DomainError, glauber_sigma, velocity
from gaussbohm.heller import rates


def test_free_linear_examples():
    s = free_linear(0.0, 0.0, 0.5, 0.0)
    assert s.alpha == 1j and s.width() == 0.5
    assert free_linear(0.0, 0.0, 0.5, 1.0).width() == pytest.approx(0.5 * math.sqrt(5), rel=1e-14)
    assert free_linear(0.0, 0.0, 0.5, 0.5).alpha == pytest.approx((1 + 1j) / 2, abs=1e-15)
    assert free_linear(0.0, 0.0, 0.5, 1.0).width() == pytest.approx(1.118034, abs=1e-6)


def test_free_general_alpha_examples():
    assert free_general_alpha(1j, 0.7) == pytest.approx(free_linear(0, 0, 0.5, 0.7).alpha)
    a0, t = (1 + 1j) / 4, 1.0
    direct = a0 / (1 + 2 * a0 * t)
    assert free_general_alpha(a0, t) == pytest.approx(direct, abs=1e-15)
    assert abs(1 + 2 * a0 * t) ** 2 == pytest.approx(1 + 4 * a0.real * t + (2 * abs(a0) * t) ** 2)
    big = free_general_alpha(a0, 1e3)
    assert abs(big - 1 / (2 * 1e3)) < 1e-6
    assert big.real > 100 * big.imag
    with pytest.raises(DomainError):
        free_general_alpha(0.3 - 0.1j, 1.0)


def test_free_classical_examples():
    s = free_classical(0.0, 1.0, None, 1j, 7.0)
    assert s.alpha == 1j and s.x_t == 7.0
    s = free_classical(0.0, 0.0, None, 0.5 + 1j, 1.0)
    assert s.alpha_r == pytest.approx(0.25) and s.alpha_i == pytest.approx(0.25)
    with pytest.raises(SingularCollapse):
        free_classical(0.0, 0.0, None, -0.5 + 1j, 1.0)
    assert free_classical(0.0, 0.0, 0.5, None, 3.0).alpha == 1j


def test_harmonic_linear_examples():
    g = 0.5j  # m omega/2 with m = omega = 1
    for t in (0.3, 1.7, 4.0):
        assert harmonic_linear(0.2, 0.1, g, 1.0, t).alpha == pytest.approx(g, abs=1e-15)
    sq = harmonic_linear(0.0, 0.0, 1j, 1.0, math.pi / 2)
    assert sq.alpha == pytest.approx(-1.0 / (4 * 1j), abs=1e-14)
    assert sq.alpha == pytest.approx(0.25j, abs=1e-14)
    # the width swings from sigma0 to (2|alpha0|/m omega) sigma0
    s0 = harmonic_linear(0.0, 0.0, 1j, 1.0, 0.0)
    assert sq.width() / s0.width() == pytest.approx(2.0, rel=1e-12)
    back = harmonic_linear(0.4, 0.3, 0.2 + 0.8j, 1.0, 2 * math.pi)
    assert back.alpha == pytest.approx(0.2 + 0.8j, abs=1e-14)
    assert (back.x_t, back.p_t) == pytest.approx((0.4, 0.3), abs=1e-14)


def test_squeezed_extremes_follow_alpha_law():
    a0 = 1.5j
    lo, hi = squeezed_extremes(a0, 1.0)
    assert lo == a0
    for wt, expected in ((0.0, lo), (math.pi / 2, hi), (math.pi, lo), (1.5 * math.pi, hi)):
        assert harmonic_linear(0, 0, a0, 1.0, wt).alpha == pytest.approx(expected, abs=1e-13)
    # at a quarter of the half period alpha is neither extreme
    mid = harmonic_linear(0, 0, a0, 1.0, math.pi / 4).alpha
    assert abs(mid - lo) > 0.1 and abs(mid - hi) > 0.1


def test_harmonic_classical_examples():
    a0 = 0.5j
    s0 = glauber_sigma(1.0)
    q = harmonic_classical(0.0, 0.0, a0, 1.0, math.pi / 4)
    assert q.width() == pytest.approx(s0 / math.sqrt(2), rel=1e-12)
    focus = harmonic_classical(1.0, 0.0, a0, 1.0, math.pi / 2)
    assert isinstance(focus, Focus)
    assert focus.x_t == pytest.approx(0.0, abs=1e-15)
    assert harmonic_classical(1.0, 0.0, a0, 1.0, math.pi).width() == pytest.approx(s0, rel=1e-12)
    s = harmonic_classical(0.0, 0.0, 0.3 + 0.5j, 1.0, 0.8)
    w = float(focal_factor(0.3, 1.0, 0.8))
    assert s.alpha_i == pytest.approx(0.5 / w**2, rel=1e-12)


def test_characteristic_time():
    assert characteristic_time(0.5) == 0.5
    assert characteristic_time(1.0) == 2.0
    assert characteristic_time(2.0) == 4 * characteristic_time(1.0)


def _cases():
    return [
        AnalyticCase.from_sigma(Regime.FREE_LINEAR, 0.3, 0.7, 0.5),
        AnalyticCase(Regime.FREE_GENERAL_ALPHA, 0.3, 0.7, 0.25 + 0.6j),
        AnalyticCase(Regime.FREE_CLASSICAL, 0.3, 0.7, 0.25 + 0.6j),
        AnalyticCase(Regime.HARMONIC_LINEAR, 0.3, 0.7, 0.25 + 0.6j, omega=1.2),
        AnalyticCase(Regime.HARMONIC_CLASSICAL, 0.3, 0.7, 0.25 + 0.6j, omega=1.2),
    ]


def test_case_validation():
    with pytest.raises(DomainError):
        AnalyticCase(Regime.HARMONIC_LINEAR, 0, 0, 1j)
    with pytest.raises(DomainError):
        AnalyticCase(Regime.FREE_LINEAR, 0, 0, 0.1 + 1j)
    with pytest.raises(DomainError):
        AnalyticCase(Regime.FREE_CLASSICAL, 0, 0, 1.0 - 1j)
    assert Regime.FREE_CLASSICAL.lam == 1.0 and Regime.HARMONIC_LINEAR.lam == 0.0


def test_closed_form_trajectory_examples():
    c = AnalyticCase.from_sigma(Regime.FREE_LINEAR, 0.0, 1.0, 0.5)
    assert bohmian_trajectory_closed_form(c, 0.0, 2.0) == pytest.approx(c.centroid(2.0))
    assert bohmian_trajectory_closed_form(c, 0.5, 1.0) - c.centroid(1.0) == \
        pytest.approx(0.5 * math.sqrt(5), abs=1e-12)
    g = AnalyticCase.from_sigma(Regime.HARMONIC_CLASSICAL, 1.0, 0.0, glauber_sigma(1.0), 1.0)
    x = bohmian_trajectory_closed_form(g, 1.0 + g.sigma0, math.pi / 2)
    assert x == pytest.approx(float(g.centroid(math.pi / 2)), abs=1e-15)


@pytest.mark.parametrize("case", _cases(), ids=lambda c: c.regime.value)
def test_closed_form_trajectory_follows_velocity_field(case):
    h = 1e-5
    for t in (0.4, 1.1, 2.3):
        if case.regime is Regime.HARMONIC_CLASSICAL and abs(float(focal_factor(
                case.alpha0.real, case.omega, t))) < 0.05:
            continue
        x0 = case.x0 + 0.8 * case.sigma0
        dxdt = (bohmian_trajectory_closed_form(case, x0, t + h)
                - bohmian_trajectory_closed_form(case, x0, t - h)) / (2 * h)
        s = case.state(t)
        v = float(velocity(s, bohmian_trajectory_closed_form(case, x0, t)))
        assert dxdt == pytest.approx(v, abs=1e-5)


@pytest.mark.parametrize("case", _cases(), ids=lambda c: c.regime.value)
def test_exponential_integral_identity(case):
    m = case.constants.mass
    t_end = 1.0  # before the first focus of the classical harmonic case
    integral, _ = quad(lambda t: 2 * case.state(t).alpha_r / m, 0.0, t_end, epsabs=1e-13)
    assert float(case.spread_factor(t_end)) == pytest.approx(math.exp(integral), rel=1e-10)


def test_short_time_expansion_general_alpha():
    a0 = 0.3 + 0.8j
    c = AnalyticCase(Regime.FREE_GENERAL_ALPHA, 0.0, 0.0, a0)
    h = 1e-3
    f = [float(c.spread_factor(k * h)) for k in range(3)]
    d1 = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    d2 = (f[0] - 2 * f[1] + f[2]) / h**2
    assert d1 == pytest.approx(2 * a0.real, abs=1e-5)  # linear term dominates
    assert d2 / 2 == pytest.approx(2 * a0.imag**2, abs=5e-3)


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(0.2, 2),
       st.floats(0.3, 3), st.floats(0, 6))
def test_harmonic_linear_satisfies_odes(x0, p0, ar, ai, omega, t):
    # the analytic state's time derivative equals the lambda = 0 right-hand side
    h = 1e-5
    a = harmonic_linear(x0, p0, complex(ar, ai), omega, t - h).as_tuple()
    b = harmonic_linear(x0, p0, complex(ar, ai), omega, t + h).as_tuple()
    s = harmonic_linear(x0, p0, complex(ar, ai), omega, t).as_tuple()
    rhs = rates(s, 0.0, (0.0, 0.0, 0.5 * omega**2), 1.0, 1.0)
    for u, v, r in zip(a, b, rhs):
        assert (v - u) / (2 * h) == pytest.approx(r, abs=1e-4 * (1 + abs(r)))


def test_free_linear_state_gamma_branch_continuity():
    ts = np.linspace(0, 50, 2001)
    g = np.array([free_linear_state(0, 0, -0.3 + 0.5j, t).gamma_r for t in ts])
    assert np.max(np.abs(np.diff(g))) < 0.05
