#!/usr/bin/env python3
"""
bsjacobi

Conditional quantum-state preparation on a lossless beam splitter:
photon-subtracted and photon-added Jacobi-polynomial states, their
phase-space functions and photon statistics, realistic photon-chopping
detection and a brute-force two-mode oracle.
"""

# Import main classes and types
from .engine import StateEngine
from .types import (
    BeamSplitterParams,
    CoherentParams,
    SqueezeParams,
    ConditionalIndices,
    ConditionalOutcome,
    ConditionalEnsemble,
    DetectorModel,
    FockMixture,
    PhasePoint,
    PhotonStats,
    QuadratureSpec,
    Tolerances,
)
from .fock import FockVector
from .beamsplitter import TwoModeState
from .exceptions import (
    BSJacobiError,
    ParameterError,
    TruncationError,
    UnreachableOutcomeError,
    GridError,
    VerificationError,
    CatalogNotLoadedError,
)
from .formatters import CLIFormatter
from .protocols import GridExecutor

# Version info
__version__ = "0.1.0"

# Public API
__all__ = [
    "StateEngine",
    "FockVector",
    "TwoModeState",
    "BeamSplitterParams",
    "CoherentParams",
    "SqueezeParams",
    "ConditionalIndices",
    "ConditionalOutcome",
    "ConditionalEnsemble",
    "DetectorModel",
    "FockMixture",
    "PhasePoint",
    "PhotonStats",
    "QuadratureSpec",
    "Tolerances",
    "CLIFormatter",
    "GridExecutor",
    "BSJacobiError",
    "ParameterError",
    "TruncationError",
    "UnreachableOutcomeError",
    "GridError",
    "VerificationError",
    "CatalogNotLoadedError",
]
