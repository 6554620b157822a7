"""Closed-form packet propagation for the exactly solvable cases.

Free and harmonic packets in the linear (lam = 0) and fully nonlinear
(lam = 1) limits.  These double as fast propagators and as ground truth for
the RK4 integrator and the trajectory engine.
"""
from __future__ import annotations

import cmath
import enum
import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import NATURAL, Constants, DomainError, GaussianState, alpha_from_sigma, \
    gamma_imag_from_alpha


class SingularCollapse(DomainError):
    """A focusing free packet reaches zero width."""


@dataclass(frozen=True)
class Focus:
    """Marker returned at an exact focal instant, where the width vanishes."""

    t: float
    x_t: float
    p_t: float


def characteristic_time(sigma0: float, constants: Constants = NATURAL) -> float:
    """Diffraction time 2 m sigma0^2 / hbar."""
    if not sigma0 > 0:
        raise DomainError(f"sigma0 must be positive, got {sigma0}")
    return 2.0 * constants.mass * sigma0 * sigma0 / constants.hbar


def _initial_alpha(sigma0, alpha0, constants) -> complex:
    if alpha0 is None:
        if sigma0 is None:
            raise DomainError("either sigma0 or alpha0 is required")
        return alpha_from_sigma(sigma0, constants)
    alpha0 = complex(alpha0)
    if not alpha0.imag > 0:
        raise DomainError(f"Im(alpha0) must be positive, got {alpha0.imag}")
    return alpha0


# -- free particle -------------------------------------------------------

def free_general_alpha(alpha0: complex, t: float, constants: Constants = NATURAL) -> complex:
    """alpha_t = alpha0 / (1 + 2 alpha0 t / m) for the linear free packet."""
    alpha0 = _initial_alpha(None, alpha0, constants)
    m = constants.mass
    d = 1.0 + 4.0 * alpha0.real * t / m + (2.0 * abs(alpha0) * t / m) ** 2
    real = (alpha0.real + 2.0 * abs(alpha0) ** 2 * t / m) / d
    return complex(real, alpha0.imag / d)


def free_linear_state(x0, p0, alpha0, t, constants: Constants = NATURAL,
                      gamma_r0: float = 0.0) -> GaussianState:
    """Linear free propagation for arbitrary complex alpha0."""
    alpha0 = _initial_alpha(None, alpha0, constants)
    hbar, m = constants.hbar, constants.mass
    z = 1.0 + 2.0 * alpha0 * t / m  # upper half plane for t > 0: principal log is continuous
    alpha_t = alpha0 / z
    log_z = cmath.log(z)
    gamma_r = gamma_r0 - 0.5 * hbar * log_z.imag + p0 * p0 * t / (2.0 * m)
    gamma_i = gamma_imag_from_alpha(alpha0.imag, constants) + 0.5 * hbar * log_z.real
    return GaussianState(float(t), x0 + p0 * t / m, float(p0), alpha_t.real, alpha_t.imag,
                         gamma_r, gamma_i)


def free_linear(x0, p0, sigma0, t, constants: Constants = NATURAL) -> GaussianState:
    """Spreading minimum-uncertainty packet, sigma_t = sigma0 sqrt(1 + (t/tau)^2)."""
    return free_linear_state(x0, p0, alpha_from_sigma(sigma0, constants), t, constants)


def free_classical(x0, p0, sigma0, alpha0, t, constants: Constants = NATURAL,
                   gamma_r0: float = 0.0) -> GaussianState:
    """Free packet at lam = 1: the quantum potential no longer feeds alpha_r.

    alpha_r = a/(1 + 2 a t/m) and alpha_i = alpha_i0/(1 + 2 a t/m)^2 with a the
    initial alpha_r; a purely imaginary alpha0 keeps its shape forever.
    """
    alpha0 = _initial_alpha(sigma0, alpha0, constants)
    m = constants.mass
    a = alpha0.real
    d = 1.0 + 2.0 * a * t / m
    if d <= 0:
        raise SingularCollapse(f"packet collapses to zero width at t = {-m / (2.0 * a):.6g}")
    alpha_r = a / d
    alpha_i = alpha0.imag / (d * d)
    return GaussianState(float(t), x0 + p0 * t / m, float(p0), alpha_r, alpha_i,
                         gamma_r0 + p0 * p0 * t / (2.0 * m),
                         gamma_imag_from_alpha(alpha_i, constants))


# -- harmonic oscillator ---------------------------------------------------

def _centroid(x0, p0, omega, t, m):
    c, s = math.cos(omega * t), math.sin(omega * t)
    return x0 * c + p0 / (m * omega) * s, p0 * c - m * omega * x0 * s


def classical_action(x0, p0, omega, t, constants: Constants = NATURAL) -> float:
    """Integral of p^2/2m - V along the harmonic centroid path."""
    m = constants.mass
    return ((p0 * p0 / (2.0 * m) - 0.5 * m * omega**2 * x0 * x0) * math.sin(2.0 * omega * t)
            / (2.0 * omega) - p0 * x0 * math.sin(omega * t) ** 2)


def _unwrapped_arg(z: complex, phase: float) -> float:
    # arg z and omega t share the open half-plane (k pi, (k+1) pi), so the
    # continuous branch is the one within pi of omega t.
    a = cmath.phase(z)
    return a + 2.0 * math.pi * round((phase - a) / (2.0 * math.pi))


def harmonic_linear(x0, p0, alpha0, omega, t, constants: Constants = NATURAL,
                    gamma_r0: float = 0.0) -> GaussianState:
    """General lam = 0 packet in V = m omega^2 x^2/2 (breathing/squeezed/coherent)."""
    alpha0 = _initial_alpha(None, alpha0, constants)
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    hbar, m = constants.hbar, constants.mass
    c, s = math.cos(omega * t), math.sin(omega * t)
    k = 2.0 * alpha0 / (m * omega)
    z = c + k * s
    alpha_t = 0.5 * m * omega * (k * c - s) / z
    xt, pt = _centroid(x0, p0, omega, t, m)
    arg = _unwrapped_arg(z, omega * t)
    gamma_r = gamma_r0 - 0.5 * hbar * arg + classical_action(x0, p0, omega, t, constants)
    gamma_i = gamma_imag_from_alpha(alpha0.imag, constants) + 0.5 * hbar * math.log(abs(z))
    return GaussianState(float(t), xt, pt, alpha_t.real, alpha_t.imag, gamma_r, gamma_i)


def squeezed_extremes(alpha0: complex, omega: float, constants: Constants = NATURAL):
    """alpha at omega t = 0, pi, ... and at omega t = pi/2, 3 pi/2, ..."""
    m = constants.mass
    alpha0 = complex(alpha0)
    return alpha0, -(m * omega) ** 2 / (4.0 * alpha0)


def focal_factor(alpha0_r: float, omega: float, t, constants: Constants = NATURAL):
    """cos(omega t) + (2 alpha0_r / m omega) sin(omega t); zero at the foci."""
    b = 2.0 * alpha0_r / (constants.mass * omega)
    return np.cos(omega * np.asarray(t)) + b * np.sin(omega * np.asarray(t))


def harmonic_classical(x0, p0, alpha0, omega, t, constants: Constants = NATURAL,
                       gamma_r0: float = 0.0):
    """lam = 1 packet in a harmonic well.

    alpha_r follows the decoupled Riccati equation, alpha_i rides on it:
    alpha_i = alpha_i0 / w^2 with w = cos(omega t) + (2 alpha_r0/m omega) sin(omega t),
    so the width is sigma0 |w|.  Returns a :class:`Focus` at w = 0.
    """
    alpha0 = _initial_alpha(None, alpha0, constants)
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    m = constants.mass
    c, s = math.cos(omega * t), math.sin(omega * t)
    b = 2.0 * alpha0.real / (m * omega)
    w = c + b * s
    xt, pt = _centroid(x0, p0, omega, t, m)
    # cos(pi/2) is ~6e-17 in floating point: "exactly at a focus" means within the
    # rounding of the argument omega t
    if abs(w) <= 4.0 * sys.float_info.epsilon * max(1.0, abs(omega * t)) * (1.0 + abs(b)):
        return Focus(float(t), xt, pt)
    alpha_r = 0.5 * m * omega * (b * c - s) / w
    alpha_i = alpha0.imag / (w * w)
    gamma_r = gamma_r0 + classical_action(x0, p0, omega, t, constants)
    return GaussianState(float(t), xt, pt, alpha_r, alpha_i, gamma_r,
                         gamma_imag_from_alpha(alpha_i, constants))


# -- trajectories ------------------------------------------------------------

class Regime(enum.Enum):
    FREE_LINEAR = "free_linear"
    FREE_GENERAL_ALPHA = "free_general_alpha"
    FREE_CLASSICAL = "free_classical"
    HARMONIC_LINEAR = "harmonic_linear"
    HARMONIC_CLASSICAL = "harmonic_classical"

    @property
    def lam(self) -> float:
        return 1.0 if self in (Regime.FREE_CLASSICAL, Regime.HARMONIC_CLASSICAL) else 0.0

    @property
    def harmonic(self) -> bool:
        return self in (Regime.HARMONIC_LINEAR, Regime.HARMONIC_CLASSICAL)


@dataclass(frozen=True)
class AnalyticCase:
    regime: Regime
    x0: float
    p0: float
    alpha0: complex
    omega: float | None = None
    constants: Constants = NATURAL

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "alpha0", complex(self.alpha0))
        if not self.alpha0.imag > 0:
            raise DomainError("Im(alpha0) must be positive")
        if self.regime.harmonic and not (self.omega is not None and self.omega > 0):
            raise DomainError(f"{self.regime.value} needs omega > 0")
        if self.regime is Regime.FREE_LINEAR and self.alpha0.real != 0.0:
            raise DomainError("free_linear is the minimum-uncertainty case (real alpha0 = 0)")

    @classmethod
    def from_sigma(cls, regime, x0, p0, sigma0, omega=None, constants=NATURAL):
        return cls(regime, x0, p0, alpha_from_sigma(sigma0, constants), omega, constants)

    @property
    def sigma0(self) -> float:
        return math.sqrt(self.constants.hbar / (4.0 * self.alpha0.imag))

    def state(self, t: float):
        r, k = self.regime, self.constants
        if r in (Regime.FREE_LINEAR, Regime.FREE_GENERAL_ALPHA):
            return free_linear_state(self.x0, self.p0, self.alpha0, t, k)
        if r is Regime.FREE_CLASSICAL:
            return free_classical(self.x0, self.p0, None, self.alpha0, t, k)
        if r is Regime.HARMONIC_LINEAR:
            return harmonic_linear(self.x0, self.p0, self.alpha0, self.omega, t, k)
        return harmonic_classical(self.x0, self.p0, self.alpha0, self.omega, t, k)

    def spread_factor(self, t):
        """exp(int_0^t 2 alpha_r/m dt'): the ratio (x(t) - x_t)/(x(0) - x0)."""
        m = self.constants.mass
        t = np.asarray(t, dtype=float)
        a = self.alpha0
        r = self.regime
        if r is Regime.FREE_LINEAR:
            return np.sqrt(1.0 + (2.0 * a.imag * t / m) ** 2)
        if r is Regime.FREE_GENERAL_ALPHA:
            return np.sqrt(1.0 + 4.0 * a.real * t / m + (2.0 * abs(a) * t / m) ** 2)
        if r is Regime.FREE_CLASSICAL:
            return 1.0 + 2.0 * a.real * t / m
        wt = self.omega * t
        b = 2.0 * a.real / (m * self.omega)
        if r is Regime.HARMONIC_LINEAR:
            q = 2.0 * abs(a) / (m * self.omega)
            return np.sqrt(np.cos(wt) ** 2 + b * np.sin(2.0 * wt) + q * q * np.sin(wt) ** 2)
        # |.| keeps each path on its own side of the centroid through a focus
        return np.abs(np.cos(wt) + b * np.sin(wt))

    def centroid(self, t):
        t = np.asarray(t, dtype=float)
        m = self.constants.mass
        if self.regime.harmonic:
            w = self.omega
            return self.x0 * np.cos(w * t) + self.p0 / (m * w) * np.sin(w * t)
        return self.x0 + self.p0 * t / m


def bohmian_trajectory_closed_form(case: AnalyticCase, x_start, t):
    """Position at time t of the Bohmian path launched from ``x_start``."""
    return case.centroid(t) + case.spread_factor(t) * (np.asarray(x_start, dtype=float)
                                                       - case.x0)
