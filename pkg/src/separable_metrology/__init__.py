"""Fock-space simulation of Heisenberg-limited phase sensing with separable probes."""

from .elements import FieldOperator, Port, interferometer_registry
from .entanglement import entanglement_entropy, reduced_density_matrix, sensing_entropy
from .experiment import (
    ExperimentConfig,
    build_state,
    detection_probability,
    n_diff_statistics,
    visibility,
)
from .fock import FockVector, ModeRegistry, Statistics
from .metrology import feasibility, min_phase_uncertainty, phase_uncertainty, sweep_uncertainty_vs_n

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "FieldOperator",
    "FockVector",
    "ModeRegistry",
    "Port",
    "Statistics",
    "build_state",
    "detection_probability",
    "entanglement_entropy",
    "feasibility",
    "interferometer_registry",
    "min_phase_uncertainty",
    "n_diff_statistics",
    "phase_uncertainty",
    "reduced_density_matrix",
    "sensing_entropy",
    "sweep_uncertainty_vs_n",
    "visibility",
]
