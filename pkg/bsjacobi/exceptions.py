#!/usr/bin/env python3
"""
exceptions.py

Custom exception classes for the bsjacobi engine.
"""


class BSJacobiError(Exception):
    """Base exception for bsjacobi errors."""


class ParameterError(BSJacobiError):
    """Raised when parameters are out of their valid range."""


class TruncationError(BSJacobiError):
    """Raised when a truncated Fock basis is too small for the state."""


class UnreachableOutcomeError(BSJacobiError):
    """Raised when a conditional outcome has (numerically) zero probability."""


class GridError(BSJacobiError):
    """Raised when a phase-space grid cannot be evaluated."""


class VerificationError(BSJacobiError):
    """Raised when a verification check fails."""


class CatalogNotLoadedError(BSJacobiError):
    """Raised when figure presets are used before loading."""
