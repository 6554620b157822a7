"""Equations of motion for the Gaussian parameters under coupling lambda.

The six real parameters (x_t, p_t, alpha_r, alpha_i, gamma_r, gamma_i) obey

    dx/dt       = p/m
    dp/dt       = -V'(x_t)
    dalpha_r/dt = -2 alpha_r^2/m + (1 - lam) 2 alpha_i^2/m - V''(x_t)/2
    dalpha_i/dt = -4 alpha_r alpha_i/m
    dgamma_r/dt = -(1 - lam) hbar alpha_i/m + p^2/m - E,   E = p^2/2m + V(x_t)
    dgamma_i/dt = hbar alpha_r/m

and are advanced with classic fixed-step RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import NATURAL, Constants, DomainError, GaussianState, gamma_imag_from_alpha

#: couplings above this are refused for confining potentials (focal blow-up)
LAMBDA_ODE_LIMIT = 1.0 - 1e-6
NORMALIZATION_TOL = 1e-6


class IntegrationError(RuntimeError):
    """The parameter integration left the domain of normalizable packets."""

    def __init__(self, message: str, t: float, partial: "HellerSeries | None" = None):
        super().__init__(f"{message} (t = {t:.6g})")
        self.t = t
        self.partial = partial


class NormalizationDrift(IntegrationError):
    pass


class AnalyticPropagationRequired(DomainError):
    """The ODE route refuses this coupling; use the lambda = 1 closed forms."""


@dataclass(frozen=True)
class HellerDerivative:
    d_x_t: float
    d_p_t: float
    d_alpha_r: float
    d_alpha_i: float
    d_gamma_r: float
    d_gamma_i: float

    def as_tuple(self):
        return (self.d_x_t, self.d_p_t, self.d_alpha_r, self.d_alpha_i,
                self.d_gamma_r, self.d_gamma_i)


@dataclass(frozen=True)
class IntegrationControls:
    t_final: float
    dt: float = 1e-3
    lam: float = 0.0
    store_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.t_final < 0:
            raise DomainError(f"t_final must be non-negative, got {self.t_final}")
        if int(self.store_every) < 1:
            raise DomainError("store_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


def check_lambda(lam: float):
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")


def rates(y, lam, coeffs, hbar, m):
    """Right-hand side on a 6-sequence of floats or equally shaped arrays."""
    x, p, ar, ai, gr, gi = y
    c0, c1, c2 = coeffs
    v = c0 + c1 * x + c2 * x * x
    v1 = c1 + 2.0 * c2 * x
    mu = 1.0 - lam
    dx = p / m
    e = p * p / (2.0 * m) + v
    return (
        dx,
        -v1,
        -2.0 * ar * ar / m + mu * 2.0 * ai * ai / m - c2,
        -4.0 * ar * ai / m,
        -mu * hbar * ai / m + p * dx - e,
        hbar * ar / m,
    )


def rk4_step(y, h, lam, coeffs, hbar, m):
    k1 = rates(y, lam, coeffs, hbar, m)
    y2 = tuple(a + 0.5 * h * b for a, b in zip(y, k1))
    k2 = rates(y2, lam, coeffs, hbar, m)
    y3 = tuple(a + 0.5 * h * b for a, b in zip(y, k2))
    k3 = rates(y3, lam, coeffs, hbar, m)
    y4 = tuple(a + h * b for a, b in zip(y, k3))
    k4 = rates(y4, lam, coeffs, hbar, m)
    return tuple(a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def heller_rhs(state: GaussianState, lam: float, potential,
               constants: Constants = NATURAL) -> HellerDerivative:
    check_lambda(lam)
    if not state.alpha_i > 0:
        raise DomainError(f"alpha_i must be positive, got {state.alpha_i}")
    d = rates(state.as_tuple(), lam, potential.coefficients(constants.mass),
              constants.hbar, constants.mass)
    return HellerDerivative(*d)


@dataclass
class HellerSeries:
    """Stored samples of one packet's parameters."""

    times: np.ndarray
    values: np.ndarray  # shape (n, 6)
    lam: float
    dt: float
    constants: Constants = field(default=NATURAL)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> GaussianState:
        return GaussianState.from_tuple(self.times[i], self.values[i])

    @property
    def final(self) -> GaussianState:
        return self[-1]

    def column(self, name: str) -> np.ndarray:
        idx = ("x_t", "p_t", "alpha_r", "alpha_i", "gamma_r", "gamma_i").index(name)
        return self.values[:, idx]

    def widths(self) -> np.ndarray:
        return np.sqrt(self.constants.hbar / (4.0 * self.column("alpha_i")))


def refuses(lam: float, potential) -> bool:
    return lam > LAMBDA_ODE_LIMIT and potential.curvature_positive


def integrate_steps(state0: GaussianState, lam: float, dt: float, n_steps: int, potential,
                    constants: Constants = NATURAL) -> np.ndarray:
    """Every RK4 step from ``state0``; raises IntegrationError on blow-up."""
    check_lambda(lam)
    if refuses(lam, potential):
        raise AnalyticPropagationRequired(
            f"lambda = {lam} with a confining potential reaches focal singularities; "
            "use the lambda = 1 analytic propagation instead")
    coeffs = potential.coefficients(constants.mass)
    hbar, m = constants.hbar, constants.mass
    out = np.empty((n_steps + 1, 6))
    y = state0.as_tuple()
    out[0] = y
    for k in range(1, n_steps + 1):
        y = rk4_step(y, dt, lam, coeffs, hbar, m)
        if not (y[3] > 0 and all(map(math.isfinite, y))):
            t_fail = state0.t + k * dt
            partial = HellerSeries(state0.t + dt * np.arange(k), out[:k].copy(), lam, dt,
                                   constants)
            raise IntegrationError("packet width collapsed or diverged", t_fail, partial)
        out[k] = y
    return out


def integrate(state0: GaussianState, controls: IntegrationControls, potential,
              constants: Constants = NATURAL, *, drift_tol: float = NORMALIZATION_TOL
              ) -> HellerSeries:
    """Fixed-step RK4 time series starting at ``state0``.

    gamma_i is integrated, not re-imposed; each stored sample is checked
    against the normalization constraint to ``drift_tol``.
    """
    if not state0.alpha_i > 0:
        raise DomainError("initial packet is not normalizable")
    if abs(state0.normalization_defect(constants)) > drift_tol:
        raise DomainError("initial packet is not normalized")
    n = controls.n_steps
    values = integrate_steps(state0, controls.lam, controls.dt, n, potential, constants)
    every = int(controls.store_every)
    idx = np.arange(0, n + 1, every)
    if idx[-1] != n:
        idx = np.append(idx, n)
    times = state0.t + controls.dt * idx
    series = HellerSeries(times, values[idx], controls.lam, controls.dt, constants)
    check_normalization(series, constants, drift_tol)
    return series


def check_normalization(series: HellerSeries, constants: Constants = NATURAL,
                        tol: float = NORMALIZATION_TOL):
    hbar = constants.hbar
    ai = series.column("alpha_i")
    expected = -0.25 * hbar * np.log(2.0 * ai / (np.pi * hbar))
    defect = np.abs(series.column("gamma_i") - expected)
    bad = np.nonzero(defect > tol)[0]
    if bad.size:
        k = bad[0]
        raise NormalizationDrift(
            f"gamma_i drifted {defect[k]:.3g} from the normalization constraint",
            float(series.times[k]), series)


__all__ = [
    "AnalyticPropagationRequired", "HellerDerivative", "HellerSeries", "IntegrationControls",
    "IntegrationError", "LAMBDA_ODE_LIMIT", "NormalizationDrift", "check_normalization",
    "gamma_imag_from_alpha", "heller_rhs", "integrate", "integrate_steps", "rates", "rk4_step",
]
