"""External potentials of polynomial degree at most two.

A Gaussian packet stays Gaussian only when the potential is (at most)
quadratic about its centroid, so these are the only kinds supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError


class Potential:
    """Base class: subclasses provide ``coefficients(mass) -> (c0, c1, c2)``."""

    kind = "base"

    def coefficients(self, mass: float) -> tuple[float, float, float]:
        raise NotImplementedError

    @property
    def curvature_positive(self) -> bool:
        return self.coefficients(1.0)[2] > 0

    def value(self, x, mass: float = 1.0):
        c0, c1, c2 = self.coefficients(mass)
        return c0 + c1 * x + c2 * x * x

    def force(self, x, mass: float = 1.0):
        c0, c1, c2 = self.coefficients(mass)
        return -(c1 + 2.0 * c2 * x)

    def taylor_at(self, x_t: float, mass: float = 1.0) -> tuple[float, float, float]:
        """(V, V', V'') at ``x_t``; exact for every supported kind."""
        c0, c1, c2 = self.coefficients(mass)
        return c0 + c1 * x_t + c2 * x_t * x_t, c1 + 2.0 * c2 * x_t, 2.0 * c2

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Free(Potential):
    kind = "free"

    def coefficients(self, mass):
        return 0.0, 0.0, 0.0

    def to_config(self):
        return {"kind": "free"}


@dataclass(frozen=True)
class Harmonic(Potential):
    """V(x) = m omega^2 x^2 / 2."""

    omega: float
    kind = "harmonic"

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"harmonic omega must be positive, got {self.omega}")

    def coefficients(self, mass):
        return 0.0, 0.0, 0.5 * mass * self.omega**2

    def to_config(self):
        return {"kind": "harmonic", "omega": self.omega}


@dataclass(frozen=True)
class Quadratic(Potential):
    """V(x) = c0 + c1 x + c2 x^2, mass independent."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    kind = "quadratic"

    @classmethod
    def from_coefficients(cls, coeffs) -> "Quadratic":
        coeffs = [float(c) for c in coeffs]
        if len(coeffs) > 3 and any(c != 0.0 for c in coeffs[3:]):
            raise DomainError("polynomial potentials above degree two are not supported")
        coeffs = (coeffs + [0.0, 0.0, 0.0])[:3]
        return cls(*coeffs)

    def coefficients(self, mass):
        return self.c0, self.c1, self.c2

    def equivalent_harmonic(self, mass: float):
        """(omega, x_eq, v_eq) so that V = m omega^2 (x - x_eq)^2 / 2 + v_eq."""
        if self.c2 <= 0:
            raise DomainError("only a confining quadratic has a harmonic equivalent")
        omega = math.sqrt(2.0 * self.c2 / mass)
        x_eq = -self.c1 / (2.0 * self.c2)
        return omega, x_eq, self.value(x_eq)

    def to_config(self):
        return {"kind": "quadratic", "c": [self.c0, self.c1, self.c2]}


def taylor_at(potential: Potential, x_t: float, mass: float = 1.0):
    return potential.taylor_at(x_t, mass)


def from_config(cfg) -> Potential:
    if isinstance(cfg, Potential):
        return cfg
    try:
        kind = cfg["kind"]
    except (KeyError, TypeError):
        raise DomainError("potential: missing 'kind'") from None
    if kind == "free":
        return Free()
    if kind == "harmonic":
        if "omega" not in cfg:
            raise DomainError("potential.omega is required for kind 'harmonic'")
        return Harmonic(float(cfg["omega"]))
    if kind == "quadratic":
        if "c" not in cfg:
            raise DomainError("potential.c is required for kind 'quadratic'")
        return Quadratic.from_coefficients(np.atleast_1d(cfg["c"]))
    raise DomainError(f"potential.kind: unknown kind {kind!r}")
