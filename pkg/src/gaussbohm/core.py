"""Gaussian wave packets in Heller form and their local field diagnostics.

A packet is

    psi(x, t) = exp[i alpha_t (x - x_t)^2 / hbar + i p_t (x - x_t) / hbar + i gamma_t / hbar]

with complex ``alpha_t`` (width and phase curvature) and complex ``gamma_t``
(global phase and normalization).  The imaginary part of ``gamma_t`` is tied
to the imaginary part of ``alpha_t`` by normalization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised for inputs outside an operation's physical domain."""


@dataclass(frozen=True)
class Constants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise DomainError(f"hbar and mass must be positive, got {self.hbar}, {self.mass}")


NATURAL = Constants()


@dataclass(frozen=True)
class GaussianState:
    """Heller parameter set of one wave packet at time ``t``."""

    t: float
    x_t: float
    p_t: float
    alpha_r: float
    alpha_i: float
    gamma_r: float
    gamma_i: float

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_r, self.alpha_i)

    @property
    def gamma(self) -> complex:
        return complex(self.gamma_r, self.gamma_i)

    def as_tuple(self) -> tuple[float, ...]:
        """The six evolving parameters, time excluded."""
        return (self.x_t, self.p_t, self.alpha_r, self.alpha_i, self.gamma_r, self.gamma_i)

    @classmethod
    def from_tuple(cls, t, values) -> "GaussianState":
        return cls(float(t), *(float(v) for v in values))

    def width(self, constants: Constants = NATURAL) -> float:
        """Position spread sigma = sqrt(hbar / (4 alpha_i))."""
        return math.sqrt(constants.hbar / (4.0 * self.alpha_i))

    def normalization_defect(self, constants: Constants = NATURAL) -> float:
        """Difference between gamma_i and the value normalization requires."""
        return self.gamma_i - gamma_imag_from_alpha(self.alpha_i, constants)


@dataclass(frozen=True)
class WaveSample:
    x: float
    amplitude: complex
    density: float
    phase: float
    velocity: float
    quantum_potential: float


def gamma_imag_from_alpha(alpha_i: float, constants: Constants = NATURAL) -> float:
    """Imaginary part of gamma that normalizes a packet with the given alpha_i."""
    if not alpha_i > 0:
        raise DomainError(f"alpha_i must be positive for a normalizable packet, got {alpha_i}")
    hbar = constants.hbar
    return -0.25 * hbar * math.log(2.0 * alpha_i / (math.pi * hbar))


def alpha_from_sigma(sigma0: float, constants: Constants = NATURAL) -> complex:
    """Purely imaginary alpha of a minimum-uncertainty packet of width sigma0."""
    if not sigma0 > 0:
        raise DomainError(f"sigma0 must be positive, got {sigma0}")
    return 1j * constants.hbar / (4.0 * sigma0 * sigma0)


def packet_state(x0, p0, alpha0, constants: Constants = NATURAL, t: float = 0.0,
                 gamma_r: float = 0.0) -> GaussianState:
    """Normalized packet with arbitrary complex alpha0."""
    alpha0 = complex(alpha0)
    gamma_i = gamma_imag_from_alpha(alpha0.imag, constants)
    return GaussianState(float(t), float(x0), float(p0), alpha0.real, alpha0.imag,
                         float(gamma_r), gamma_i)


def minimum_uncertainty_state(x0, p0, sigma0, constants: Constants = NATURAL) -> GaussianState:
    """Real-envelope Gaussian of width sigma0 centred at (x0, p0)."""
    alpha0 = alpha_from_sigma(sigma0, constants)
    # gamma_i = (hbar/4) ln(2 pi sigma0^2), written through the general constraint
    return packet_state(x0, p0, alpha0, constants)


def glauber_sigma(omega: float, constants: Constants = NATURAL) -> float:
    """Width of the coherent state of a harmonic well, sqrt(hbar / 2 m omega)."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    return math.sqrt(constants.hbar / (2.0 * constants.mass * omega))


def log_amplitude(state: GaussianState, x, constants: Constants = NATURAL):
    """Complex exponent i[alpha y^2 + p y + gamma]/hbar, y = x - x_t."""
    y = np.asarray(x, dtype=float) - state.x_t
    return 1j * (state.alpha * y * y + state.p_t * y + state.gamma) / constants.hbar


def amplitude(state: GaussianState, x, constants: Constants = NATURAL):
    return np.exp(log_amplitude(state, x, constants))


def density(state: GaussianState, x, constants: Constants = NATURAL):
    y = np.asarray(x, dtype=float) - state.x_t
    return np.exp(-2.0 * (state.alpha_i * y * y + state.gamma_i) / constants.hbar)


def phase(state: GaussianState, x, constants: Constants = NATURAL):
    """Real phase S(x) in action units (not reduced modulo 2 pi hbar)."""
    y = np.asarray(x, dtype=float) - state.x_t
    return state.alpha_r * y * y + state.p_t * y + state.gamma_r


def velocity(state: GaussianState, x, constants: Constants = NATURAL):
    y = np.asarray(x, dtype=float) - state.x_t
    return (state.p_t + 2.0 * state.alpha_r * y) / constants.mass


def quantum_potential(state: GaussianState, x, constants: Constants = NATURAL):
    """Q = -(hbar^2/2m) A''/A for A = exp[-(alpha_i y^2 + gamma_i)/hbar].

    With ln A quadratic, A''/A = (2 alpha_i y/hbar)^2 - 2 alpha_i/hbar, so
    Q = hbar alpha_i/m - 2 alpha_i^2 y^2/m.
    """
    y = np.asarray(x, dtype=float) - state.x_t
    a = state.alpha_i
    m = constants.mass
    return constants.hbar * a / m - 2.0 * a * a * y * y / m


def evaluate(state: GaussianState, x: float, constants: Constants = NATURAL) -> WaveSample:
    if not state.alpha_i > 0:
        raise DomainError(f"alpha_i must be positive, got {state.alpha_i}")
    x = float(x)
    return WaveSample(
        x=x,
        amplitude=complex(amplitude(state, x, constants)),
        density=float(density(state, x, constants)),
        phase=float(phase(state, x, constants)),
        velocity=float(velocity(state, x, constants)),
        quantum_potential=float(quantum_potential(state, x, constants)),
    )


def overlap(bra: GaussianState, ket: GaussianState, constants: Constants = NATURAL) -> complex:
    """Closed-form <bra|ket> for two Heller packets.

    The integrand is exp(-a x^2 + b x + c) with Re a > 0, integrating to
    sqrt(pi/a) exp(b^2/4a + c).
    """
    hbar = constants.hbar
    ak, aj = ket.alpha, bra.alpha.conjugate()
    xk, xj = ket.x_t, bra.x_t
    pk, pj = ket.p_t, bra.p_t
    # i/hbar [ak (x-xk)^2 + pk (x-xk) + gk] - i/hbar [aj (x-xj)^2 + pj (x-xj) + gj]
    a = -1j * (ak - aj) / hbar
    b = 1j * (-2.0 * ak * xk + pk + 2.0 * aj * xj - pj) / hbar
    c = 1j * (ak * xk * xk - pk * xk + ket.gamma
              - aj * xj * xj + pj * xj - bra.gamma.conjugate()) / hbar
    return complex(np.sqrt(np.pi / a) * np.exp(b * b / (4.0 * a) + c))


def phase_equation_residual(state: GaussianState, lam: float, potential, x,
                            constants: Constants = NATURAL, derivative=None):
    """Residual of -dS/dt = (dS/dx)^2/2m + V + (1 - lam) Q at position x.

    ``derivative`` supplies the parameter time-derivatives; by default they
    come from the Heller equations of motion at coupling ``lam``.  At lam = 1
    this is the classical Hamilton-Jacobi residual.
    """
    from .heller import heller_rhs

    if derivative is None:
        derivative = heller_rhs(state, lam, potential, constants)
    m = constants.mass
    y = np.asarray(x, dtype=float) - state.x_t
    ds_dt = (derivative.d_alpha_r * y * y
             - 2.0 * state.alpha_r * y * derivative.d_x_t
             + derivative.d_p_t * y
             - state.p_t * derivative.d_x_t
             + derivative.d_gamma_r)
    ds_dx = 2.0 * state.alpha_r * y + state.p_t
    v = potential.value(np.asarray(x, dtype=float), m)
    q = quantum_potential(state, x, constants)
    return -ds_dt - ds_dx * ds_dx / (2.0 * m) - v - (1.0 - lam) * q
