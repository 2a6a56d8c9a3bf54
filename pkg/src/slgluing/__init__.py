"""Numerical verification of a glued family of branched special Lagrangian
immersions in a flat Calabi-Yau model.

Modules
-------
config
    Model parameters and the flat ``key = value`` configuration format.
flat_model
    The model special Lagrangian ``psi^a`` and its symplectic identifications.
gluing
    The smooth cut-off and the glued immersion.
regions
    Region tables of the phase-norm exponents.
geometry
    Curvature, connection and neighborhood quantities of the glued family.
asymptotics
    Phase-norm sweeps, exponent fits and the logarithmic partition of unity.
spectral
    Finite-volume Laplacians on branched solid tori.
report, suites, cli
    Verification records, the suites and the command-line entry point.
"""

from .config import ConfigError, ModelParams, load_config
from .report import Check, ExperimentConfig, VerificationReport, build_config, emit_reports
from .suites import run_suite

__all__ = ["Check", "ConfigError", "ExperimentConfig", "ModelParams", "VerificationReport",
           "build_config", "emit_reports", "load_config", "run_suite"]
__version__ = "0.1.0"
