#!/usr/bin/env python3
"""
Shared fixtures for the bsjacobi tests.
"""

import sys
from pathlib import Path

import pytest

# Add the parent directory to the Python path to import the bsjacobi package
sys.path.insert(0, str(Path(__file__).parent.parent))

from bsjacobi.fock import coherent_state, default_dim, default_dim_squeezed, squeezed_vacuum  # noqa: E402
from bsjacobi.types import BeamSplitterParams, CoherentParams, SqueezeParams  # noqa: E402

FIG_BETA = 2.3
FIG_T2 = 0.81


@pytest.fixture
def fig_bs() -> BeamSplitterParams:
    return BeamSplitterParams.from_transmissivity(FIG_T2)


@pytest.fixture
def fig_beta() -> CoherentParams:
    return CoherentParams(FIG_BETA)


@pytest.fixture
def fig_coherent(fig_beta):
    return coherent_state(fig_beta, default_dim(FIG_BETA, 4, 6))


@pytest.fixture
def squeezed_input():
    p = SqueezeParams(0.3)
    return p, squeezed_vacuum(p, default_dim_squeezed(p, 4, 6))


class SerialExecutor:
    """Order-preserving map on the calling thread."""

    def map(self, fn, *iterables):
        return map(fn, *iterables)


@pytest.fixture
def serial_executor() -> SerialExecutor:
    return SerialExecutor()
