"""Gaussian wave packets under a lambda-coupled classicality potential.

Heller parameter propagation, closed-form solutions, Bohmian and classical
trajectory ensembles, and a scenario runner with named presets.
"""
__version__ = "0.1.0"

from .core import (NATURAL, Constants, DomainError, GaussianState, WaveSample, alpha_from_sigma,
                   evaluate, gamma_imag_from_alpha, glauber_sigma, minimum_uncertainty_state,
                   overlap, packet_state, phase_equation_residual, quantum_potential)
from .heller import (AnalyticPropagationRequired, HellerSeries, IntegrationControls,
                     IntegrationError, NormalizationDrift, heller_rhs, integrate)
from .potentials import Free, Harmonic, Potential, Quadratic
from .trajectories import (NodeReport, SuperpositionState, TrajectoryEnsemble,
                           classical_ensemble, detect_nodes, integrate_ensemble,
                           non_crossing_audit, velocity_single, velocity_superposition)

__all__ = [
    "AnalyticPropagationRequired", "Constants", "DomainError", "Free", "GaussianState",
    "Harmonic", "HellerSeries", "IntegrationControls", "IntegrationError", "NATURAL",
    "NodeReport", "NormalizationDrift", "Potential", "Quadratic", "SuperpositionState",
    "TrajectoryEnsemble", "WaveSample", "alpha_from_sigma", "classical_ensemble",
    "detect_nodes", "evaluate", "gamma_imag_from_alpha", "glauber_sigma", "heller_rhs",
    "integrate", "integrate_ensemble", "minimum_uncertainty_state", "non_crossing_audit",
    "overlap", "packet_state", "phase_equation_residual", "quantum_potential",
    "velocity_single", "velocity_superposition",
]
