"""Named scenarios reproducing the figure set, expanded to explicit configs.

Every preset uses hbar = m = 1, 15 paths per packet over +-2.5 sigma0 and a
step of 2e-3 with output every fifth step.  Glauber widths are written out
numerically so that a preset round-trips as a plain document.
"""
from __future__ import annotations

import math

from .core import NATURAL, glauber_sigma
from .potentials import Free, Harmonic
from .scenario import (ConfigError, EnsembleSpec, IntegrationSpec, OutputSpec, PacketSpec,
                       ScenarioConfig)

DT = 2e-3
STORE_EVERY = 5
GLAUBER = glauber_sigma(1.0, NATURAL)
PERIOD = 2.0 * math.pi
HALF_PERIOD = math.pi

_LINEAR_TO_CLASSICAL = (0.0, 0.7, 0.9, 1.0)
_LINEAR_TO_FOCUSING = (0.0, 0.7, 0.9, 0.999)


def _config(name, description, potential, packets, lam, t_final, nodes=False):
    return ScenarioConfig(
        name=name, description=description, potential=potential, packets=tuple(packets),
        lambdas=(float(lam),), integration=IntegrationSpec(t_final, DT, STORE_EVERY),
        ensemble=EnsembleSpec(15, 2.5, "uniform"), outputs=OutputSpec(nodes=nodes))


def _family(prefix, description, potential, packets, lambdas, t_final, nodes=False):
    return {f"{prefix}{letter}": (lambda lam=lam, letter=letter: _config(
        f"{prefix}{letter}", f"{description}, lambda = {lam}", potential, packets, lam,
        t_final, nodes)) for letter, lam in zip("abcd", lambdas)}


_BUILDERS = {}
_BUILDERS.update(_family(
    "fig1", "free packet, sigma0 = 0.5, x0 = p0 = 0", Free(),
    [PacketSpec(0.0, 0.0, sigma0=0.5)], _LINEAR_TO_CLASSICAL, 5.0))
_BUILDERS.update(_family(
    "fig2", "harmonic omega = 1, coherent packet from the centre with p0 = 1", Harmonic(1.0),
    [PacketSpec(0.0, 1.0, sigma0=GLAUBER)], _LINEAR_TO_FOCUSING, PERIOD))
_BUILDERS.update(_family(
    "fig3", "harmonic omega = 1, coherent packet from the turning point x0 = 1", Harmonic(1.0),
    [PacketSpec(1.0, 0.0, sigma0=GLAUBER)], _LINEAR_TO_FOCUSING, PERIOD))
_BUILDERS["fig4a"] = lambda: _config(
    "fig4a", "first focus of fig2d, half a period", Harmonic(1.0),
    [PacketSpec(0.0, 1.0, sigma0=GLAUBER)], 0.999, HALF_PERIOD)
_BUILDERS["fig4b"] = lambda: _config(
    "fig4b", "first focus of fig3d, half a period", Harmonic(1.0),
    [PacketSpec(1.0, 0.0, sigma0=GLAUBER)], 0.999, HALF_PERIOD)
_BUILDERS.update(_family(
    "fig5", "free superposition at +-3, sigma0 = 0.5, p0 = 0", Free(),
    [PacketSpec(3.0, 0.0, sigma0=0.5), PacketSpec(-3.0, 0.0, sigma0=0.5)],
    _LINEAR_TO_CLASSICAL, 5.0, nodes=True))
_BUILDERS.update(_family(
    "fig6", "free head-on collision from +-3 with momenta -+10", Free(),
    [PacketSpec(3.0, -10.0, sigma0=0.5), PacketSpec(-3.0, 10.0, sigma0=0.5)],
    _LINEAR_TO_CLASSICAL, 0.6, nodes=True))
_BUILDERS.update(_family(
    "fig7", "harmonic omega = 1, coherent packets from the turning points +-5", Harmonic(1.0),
    [PacketSpec(5.0, 0.0, sigma0=GLAUBER), PacketSpec(-5.0, 0.0, sigma0=GLAUBER)],
    _LINEAR_TO_FOCUSING, PERIOD, nodes=True))
_BUILDERS["fig8a"] = lambda: _config(
    "fig8a", "closest approach of fig7a, half a period", Harmonic(1.0),
    [PacketSpec(5.0, 0.0, sigma0=GLAUBER), PacketSpec(-5.0, 0.0, sigma0=GLAUBER)], 0.0,
    HALF_PERIOD, nodes=True)
_BUILDERS["fig8b"] = lambda: _config(
    "fig8b", "closest approach of fig7d, half a period", Harmonic(1.0),
    [PacketSpec(5.0, 0.0, sigma0=GLAUBER), PacketSpec(-5.0, 0.0, sigma0=GLAUBER)], 0.999,
    HALF_PERIOD, nodes=True)

PRESETS = tuple(sorted(_BUILDERS))


def preset(name: str) -> ScenarioConfig:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from "
                          f"{', '.join(PRESETS)}") from None


__all__ = ["PRESETS", "preset"]
