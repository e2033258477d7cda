#!/usr/bin/env python3
"""
Tests for the two-mode oracle.
"""

import numpy as np
import pytest

from bsjacobi.beamsplitter import (
    TwoModeState,
    conditional_from_mixture,
    oracle_conditional,
    probability_closed_generic,
    probability_map,
    transform_two_mode,
    transform_two_mode_blocks,
    transform_two_mode_expm,
)
from bsjacobi.exceptions import TruncationError, UnreachableOutcomeError
from bsjacobi.fock import FockVector, coherent_state
from bsjacobi.types import BeamSplitterParams, CoherentParams, ConditionalIndices


def test_single_photon_splits():
    bs = BeamSplitterParams(0.6, phiT=0.2, phiR=-0.7)
    state = TwoModeState.product(FockVector.basis(1, 2), FockVector.basis(0, 2))
    out = transform_two_mode(state, bs)
    assert out.amps[1, 0] == pytest.approx(bs.T)
    assert out.amps[0, 1] == pytest.approx(-np.conj(bs.R))


def test_coherent_product_stays_product():
    bs = BeamSplitterParams.from_transmissivity(0.4, phiT=0.3, phiR=1.1)
    beta = 1.3
    dim = 40
    state = TwoModeState.product(coherent_state(CoherentParams(beta), dim), FockVector.basis(0, 1), dims=(dim, dim))
    out = transform_two_mode(state, bs)
    ref = np.outer(coherent_state(CoherentParams(bs.T * beta), dim).amps,
                   coherent_state(CoherentParams(-np.conj(bs.R) * beta), dim).amps)
    np.testing.assert_allclose(out.amps, ref, atol=1e-12)


def test_factored_transform_matches_expm():
    rng = np.random.default_rng(3)
    amps = np.zeros((8, 8), dtype=complex)
    amps[:4, :4] = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    amps /= np.linalg.norm(amps)
    bs = BeamSplitterParams(0.9, phiT=0.4, phiR=-1.2)
    out = transform_two_mode(TwoModeState(amps), bs)
    ref = transform_two_mode_expm(TwoModeState(amps), bs)
    np.testing.assert_allclose(out.amps, ref.amps, atol=1e-12)
    assert out.norm_squared == pytest.approx(1.0, abs=1e-12)


def test_photon_number_conserved():
    bs = BeamSplitterParams.from_transmissivity(0.81)
    state = TwoModeState.product(coherent_state(CoherentParams(1.0), 30), FockVector.basis(2, 3), dims=(32, 32))
    before = state.mean_total_photons()
    assert transform_two_mode(state, bs).mean_total_photons() == pytest.approx(before, rel=1e-10)


def test_leakage_is_reported():
    bs = BeamSplitterParams.from_transmissivity(0.5)
    state = TwoModeState.product(FockVector.basis(3, 4), FockVector.basis(3, 4))
    with pytest.raises(TruncationError):
        transform_two_mode(state, bs)


def test_zero_transmittance_swaps_modes():
    bs = BeamSplitterParams(np.pi / 2, phiR=0.3)
    state = TwoModeState.product(FockVector.basis(1, 2), FockVector.basis(0, 2))
    out = transform_two_mode(state, bs)
    assert out.amps[0, 1] == pytest.approx(-np.conj(bs.R))
    assert abs(out.amps[1, 0]) < 1e-15


@pytest.mark.parametrize("t2", [0.0, 0.001, 0.01, 0.05, 0.3, 0.81])
def test_transform_stable_at_small_transmittance(t2):
    bs = BeamSplitterParams.from_transmissivity(t2, phiT=0.4, phiR=-1.2)
    state = TwoModeState.product(FockVector.basis(1, 2), FockVector.basis(2, 3), dims=(12, 12))
    out = transform_two_mode(state, bs)
    ref = transform_two_mode_expm(state, bs)
    np.testing.assert_allclose(out.amps, ref.amps, atol=1e-12)
    assert out.leakage < 1e-12


def test_blockwise_transform_matches_expm():
    rng = np.random.default_rng(5)
    amps = np.zeros((8, 8), dtype=complex)
    amps[:3, :3] = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    amps /= np.linalg.norm(amps)
    bs = BeamSplitterParams(0.7, phiT=-0.5, phiR=0.9)
    out = transform_two_mode_blocks(TwoModeState(amps), bs)
    ref = transform_two_mode_expm(TwoModeState(amps), bs)
    np.testing.assert_allclose(out.amps, ref.amps, atol=1e-12)


def test_hong_ou_mandel_null():
    bs = BeamSplitterParams.from_transmissivity(0.5, phiT=0.2, phiR=0.9)
    state = TwoModeState.product(FockVector.basis(1, 2), FockVector.basis(1, 2), dims=(3, 3))
    out = transform_two_mode(state, bs)
    assert abs(out.amps[1, 1]) < 1e-12
    assert abs(out.amps[2, 0]) ** 2 == pytest.approx(0.5)
    assert probability_map(FockVector.basis(1, 2), 1, bs, 2)[1] < 1e-24


def test_fock_input_gives_fock_output():
    # |k>|n> conditioned on m gives |k+n-m>
    bs = BeamSplitterParams.from_transmissivity(0.4)
    out = oracle_conditional(FockVector.basis(2, 3), ConditionalIndices(1, 2), bs)
    assert out.state.probabilities[1] == pytest.approx(1.0)


def test_unreachable_outcome():
    bs = BeamSplitterParams.from_transmissivity(0.4)
    with pytest.raises(UnreachableOutcomeError):
        oracle_conditional(FockVector.basis(0, 1), ConditionalIndices(0, 1), bs)


def test_probability_map_sums_to_one(fig_coherent, fig_bs):
    probs = probability_map(fig_coherent, 3, fig_bs, fig_coherent.dim + 2)
    assert probs.sum() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n, m", [(0, 0), (2, 3), (3, 2), (4, 1)])
def test_generic_closed_probability(fig_coherent, fig_bs, n, m):
    probs = probability_map(fig_coherent, n, fig_bs, m)
    closed = probability_closed_generic(fig_coherent.probabilities, ConditionalIndices(n, m), fig_bs)
    assert closed == pytest.approx(probs[m], abs=1e-10)


def test_mixture_of_pure_inputs(fig_bs):
    members = [(0.5, FockVector.basis(1, 2)), (0.5, FockVector.basis(3, 4))]
    ens = conditional_from_mixture(members, ConditionalIndices(1, 2), fig_bs)
    assert ens.total_weight == pytest.approx(1.0)
    single = [oracle_conditional(v, ConditionalIndices(1, 2), fig_bs).probability for _, v in members]
    assert ens.total_probability == pytest.approx(0.5 * sum(single))
