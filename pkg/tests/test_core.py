import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gaussbohm.core import (NATURAL, Constants, DomainError, GaussianState, alpha_from_sigma,
                            density, evaluate, gamma_imag_from_alpha, glauber_sigma,
                            minimum_uncertainty_state, overlap, packet_state, phase,
                            phase_equation_residual, quantum_potential, velocity)
from gaussbohm.heller import IntegrationControls, integrate, rk4_step
from gaussbohm.potentials import Free, Harmonic, Quadratic

# (1/4) ln(pi/2): independent closed form of -(1/4) ln(2 alpha_i / pi) at alpha_i = 1
GAMMA_I_SIGMA_HALF = 0.25 * math.log(math.pi / 2.0)


def test_gamma_imag_examples():
    assert gamma_imag_from_alpha(1.0) == pytest.approx(0.1128956, abs=1e-7)
    assert gamma_imag_from_alpha(1.0) == pytest.approx(GAMMA_I_SIGMA_HALF, abs=1e-15)
    # width form (hbar/4) ln(2 pi sigma0^2) at sigma0 = 0.5
    assert gamma_imag_from_alpha(1.0) == pytest.approx(0.25 * math.log(2 * math.pi * 0.25))
    assert gamma_imag_from_alpha(math.pi / 2.0) == pytest.approx(0.0, abs=1e-15)
    assert gamma_imag_from_alpha(0.25) == pytest.approx(0.459469, abs=1e-6)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_gamma_imag_rejects_non_normalizable(bad):
    with pytest.raises(DomainError):
        gamma_imag_from_alpha(bad)


def test_constants_validated():
    with pytest.raises(DomainError):
        Constants(hbar=0.0)
    with pytest.raises(DomainError):
        Constants(mass=-1.0)


def test_minimum_uncertainty_state():
    s = minimum_uncertainty_state(0.0, 0.0, 0.5)
    assert (s.alpha_r, s.alpha_i, s.gamma_r) == (0.0, 1.0, 0.0)
    assert s.gamma_i == pytest.approx(GAMMA_I_SIGMA_HALF, abs=1e-15)
    g = minimum_uncertainty_state(0.0, 1.0, glauber_sigma(1.0))
    assert g.alpha_i == pytest.approx(0.5, abs=1e-15)
    assert g.width() == pytest.approx(math.sqrt(0.5))
    with pytest.raises(DomainError):
        minimum_uncertainty_state(0.0, 0.0, 0.0)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.05, 5.0),
       st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_constructed_states_satisfy_constraint(x0, p0, sigma0, hbar, mass):
    k = Constants(hbar, mass)
    s = minimum_uncertainty_state(x0, p0, sigma0, k)
    assert s.normalization_defect(k) == pytest.approx(0.0, abs=1e-12)
    assert s.width(k) == pytest.approx(sigma0, rel=1e-12)


def test_evaluate_at_centroid():
    s = minimum_uncertainty_state(0.3, 1.7, 0.5)
    w = evaluate(s, s.x_t)
    assert w.density == pytest.approx(math.sqrt(2.0 * s.alpha_i / math.pi), rel=1e-14)
    assert w.density == pytest.approx((2 * math.pi * 0.25) ** -0.5, rel=1e-14)
    assert w.density == pytest.approx(abs(w.amplitude) ** 2, rel=1e-14)
    assert w.velocity == pytest.approx(1.7)


def test_evaluate_rejects_bad_state():
    with pytest.raises(DomainError):
        evaluate(GaussianState(0, 0, 0, 0, -1.0, 0, 0), 0.0)


@pytest.mark.parametrize("alpha0", [1j, 0.3 + 0.7j, -0.4 + 2j])
def test_density_quadrature(alpha0):
    s = packet_state(0.4, -1.2, alpha0)
    sig = s.width()
    total, _ = quad(lambda x: float(density(s, x)), s.x_t - 10 * sig, s.x_t + 10 * sig,
                    epsabs=1e-13, epsrel=1e-13)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_amplitude_phase_density_consistency():
    s = packet_state(0.2, 0.8, 0.3 + 0.6j, gamma_r=0.1)
    x = np.linspace(-2, 2, 9)
    w = [evaluate(s, xi) for xi in x]
    for sample in w:
        assert sample.density == pytest.approx(abs(sample.amplitude) ** 2, rel=1e-12)
        # the phase is defined up to 2 pi hbar
        d = np.angle(sample.amplitude) - sample.phase
        assert math.remainder(d, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_velocity_is_phase_gradient():
    s = packet_state(0.2, 0.8, 0.3 + 0.6j)
    x, h = 0.7, 1e-5
    fd = (phase(s, x + h) - phase(s, x - h)) / (2 * h)
    assert float(velocity(s, x)) == pytest.approx(fd, rel=1e-9)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 3.0), st.floats(-5, 5))
def test_velocity_linear_in_offset(ar, x_t, ai, p):
    s = GaussianState(0.0, x_t, p, ar, ai, 0.0, gamma_imag_from_alpha(ai))
    y = np.array([-1.0, 0.5, 2.0])
    v = velocity(s, x_t + y) - velocity(s, x_t)
    assert np.allclose(v, 2.0 * ar * y, atol=1e-12)


def test_quantum_potential_matches_finite_difference():
    k = Constants(hbar=0.7, mass=1.3)
    s = packet_state(0.1, 0.0, 0.2 + 0.9j, k)
    h = 1e-4
    for x in (-0.5, 0.1, 0.8):
        amp = lambda z: math.sqrt(float(density(s, z, k)))
        a2 = (amp(x + h) - 2 * amp(x) + amp(x - h)) / h**2
        q_fd = -(k.hbar**2 / (2 * k.mass)) * a2 / amp(x)
        assert float(quantum_potential(s, x, k)) == pytest.approx(q_fd, rel=1e-6, abs=1e-7)


def _fd_phase_residual(state, lam, potential, x, k, h=1e-4):
    """Independent oracle: dS/dt by central differences of two short RK4 integrations."""
    coeffs = potential.coefficients(k.mass)
    fwd = GaussianState.from_tuple(state.t + h, rk4_step(state.as_tuple(), h, lam, coeffs,
                                                        k.hbar, k.mass))
    bwd = GaussianState.from_tuple(state.t - h, rk4_step(state.as_tuple(), -h, lam, coeffs,
                                                        k.hbar, k.mass))
    ds_dt = (phase(fwd, x, k) - phase(bwd, x, k)) / (2 * h)
    ds_dx = 2 * state.alpha_r * (x - state.x_t) + state.p_t
    return -ds_dt - ds_dx**2 / (2 * k.mass) - potential.value(x, k.mass) \
        - (1 - lam) * quantum_potential(state, x, k)


@settings(max_examples=50)
@given(st.floats(-2, 2), st.floats(-3, 3), st.floats(-1, 1), st.floats(0.1, 2.0),
       st.floats(-3, 3), st.sampled_from(["free", "harmonic", "quadratic"]))
def test_phase_residual_vanishes_at_lambda_one(x_t, p, ar, ai, x, kind):
    pot = {"free": Free(), "harmonic": Harmonic(1.3),
           "quadratic": Quadratic(0.2, -0.4, 0.7)}[kind]
    s = GaussianState(0.0, x_t, p, ar, ai, 0.3, gamma_imag_from_alpha(ai))
    assert abs(float(phase_equation_residual(s, 1.0, pot, x))) <= 1e-8


def test_phase_residual_examples():
    g = minimum_uncertainty_state(0.5, 0.3, glauber_sigma(1.0))
    for x in np.linspace(-2, 2, 7):
        assert abs(float(phase_equation_residual(g, 0.0, Harmonic(1.0), x))) <= 1e-8
    f = minimum_uncertainty_state(0.0, 1.0, 0.5)
    assert abs(float(phase_equation_residual(f, 0.5, Free(), f.x_t + 0.5))) <= 1e-8


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_phase_residual_agrees_with_finite_difference_oracle(lam):
    k = Constants(1.0, 1.0)
    s = packet_state(0.3, 0.9, 0.2 + 0.8j, k)
    pot = Harmonic(1.1)
    for x in (-0.7, 0.3, 1.1):
        assert abs(_fd_phase_residual(s, lam, pot, x, k)) < 1e-6
        assert abs(float(phase_equation_residual(s, lam, pot, x, k))) <= 1e-8


def test_phase_residual_detects_wrong_derivative():
    from gaussbohm.heller import heller_rhs

    s = minimum_uncertainty_state(0.0, 1.0, 0.5)
    d = heller_rhs(s, 0.0, Free())
    # the lambda = 0 derivative violates the lambda = 1 phase equation
    assert abs(float(phase_equation_residual(s, 1.0, Free(), 0.5, derivative=d))) > 1e-3


def test_overlap_closed_form_against_quadrature():
    a = packet_state(0.5, 1.0, 0.2 + 0.9j, gamma_r=0.3)
    b = packet_state(-0.4, -0.5, -0.1 + 1.4j, gamma_r=-0.2)
    from gaussbohm.core import amplitude

    def integrand(x, part):
        v = np.conj(amplitude(a, x)) * amplitude(b, x)
        return float(v.real if part == 0 else v.imag)

    re = quad(integrand, -12, 12, args=(0,), epsabs=1e-13)[0]
    im = quad(integrand, -12, 12, args=(1,), epsabs=1e-13)[0]
    ov = overlap(a, b)
    assert ov.real == pytest.approx(re, abs=1e-10)
    assert ov.imag == pytest.approx(im, abs=1e-10)
    assert overlap(a, a) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_evolved_states_stay_normalized(lam):
    s0 = packet_state(0.0, 1.0, 0.3 + 1.0j)
    series = integrate(s0, IntegrationControls(3.0, 1e-3, lam, 500), Free())
    for i in range(len(series)):
        s = series[i]
        total, _ = quad(lambda x: float(density(s, x)), s.x_t - 12 * s.width(),
                        s.x_t + 12 * s.width(), epsabs=1e-12, epsrel=1e-12)
        assert total == pytest.approx(1.0, abs=1e-8)


def test_alpha_from_sigma():
    assert alpha_from_sigma(0.5) == 1j
    assert alpha_from_sigma(1.0, Constants(hbar=2.0)) == 0.5j
    with pytest.raises(DomainError):
        alpha_from_sigma(-1.0)
    with pytest.raises(DomainError):
        glauber_sigma(0.0)
    assert NATURAL.hbar == NATURAL.mass == 1.0
