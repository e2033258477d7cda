#!/usr/bin/env python3
"""
Tests for the photon-chopping detector and realistic conditioning.
"""

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.stats import poisson

from bsjacobi.detection import (
    binomial_mixture,
    chopping_matrix,
    click_distribution,
    click_given_photons,
    ensemble_density,
    ensemble_observables,
    evidence,
    fock_mixture,
    loss_matrix,
    members_by_count,
    mixed_conditional_output,
    monte_carlo_clicks,
    posterior_photons_given_clicks,
    prior_probabilities,
    total_click_probability,
)
from bsjacobi.exceptions import ParameterError, UnreachableOutcomeError
from bsjacobi.fock import FockVector, coherent_state, default_dim
from bsjacobi.jpstates import jp_state_general
from bsjacobi.phasespace import phase_grid, quadrature_dist_numeric, wigner_grid
from bsjacobi.types import (
    BeamSplitterParams,
    CoherentParams,
    ConditionalIndices,
    DetectorModel,
    FockMixture,
    QuadratureSpec,
)
from bsjacobi.verification import closed_click_probability


@pytest.fixture
def mixture_input():
    return coherent_state(CoherentParams(2.3), default_dim(2.3))


@pytest.fixture
def chopping_detector():
    return DetectorModel(N=20, eta=0.9)


def test_single_diode_clicks_on_any_light():
    P = chopping_matrix(1, 4)
    assert P.shape == (2, 5)
    np.testing.assert_array_equal(P[0], [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(P[1], [0, 1, 1, 1, 1])


def test_two_diodes_two_photons():
    P = chopping_matrix(2, 2)
    assert P[:, 2] == pytest.approx([0.0, 0.5, 0.5])


def test_more_clicks_than_photons_impossible():
    P = chopping_matrix(20, 6)
    assert np.all(np.tril(P, k=-1) == 0.0)


@pytest.mark.parametrize("N, m_max", [(1, 5), (4, 10), (20, 40), (50, 12)])
def test_chopping_column_stochastic(N, m_max):
    P = chopping_matrix(N, m_max)
    np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-12)
    assert P.min() >= 0.0


def test_chopping_approaches_photon_counting():
    P = chopping_matrix(5000, 5)
    tv = 0.5 * np.abs(P[:6, 5] - np.eye(6)[5]).sum()
    assert tv < 0.01


def test_chopping_rejects_bad_sizes():
    with pytest.raises(ParameterError):
        chopping_matrix(0, 3)
    with pytest.raises(ParameterError):
        chopping_matrix(3, -1)


def test_loss_matrix_column():
    M = loss_matrix(0.9, 2)
    assert M[:, 2] == pytest.approx([0.01, 0.18, 0.81])
    np.testing.assert_allclose(M.sum(axis=0), 1.0)


def test_unit_efficiency_is_identity():
    np.testing.assert_allclose(loss_matrix(1.0, 6), np.eye(7), atol=1e-15)


@pytest.mark.parametrize("eta", [0.0, 1.5])
def test_loss_rejects_bad_efficiency(eta):
    with pytest.raises(ParameterError):
        loss_matrix(eta, 3)


def test_detector_model_validation():
    with pytest.raises(ParameterError):
        DetectorModel(N=0)
    with pytest.raises(ParameterError):
        DetectorModel(N=4, eta=0.0)


def test_click_matrix_column_stochastic(chopping_detector):
    np.testing.assert_allclose(click_given_photons(chopping_detector, 30).sum(axis=0), 1.0, atol=1e-12)


def test_monte_carlo_agrees_with_click_model(chopping_detector):
    samples = 20000
    freq = monte_carlo_clicks(chopping_detector, 4, samples, seed=7)
    exact = click_given_photons(chopping_detector, 4)[:, 4]
    sigma = np.sqrt(exact * (1 - exact) / samples)
    assert np.all(np.abs(freq - exact) <= 4 * sigma + 1e-3)
    assert freq.sum() == pytest.approx(1.0)


def test_monte_carlo_no_photons(chopping_detector):
    freq = monte_carlo_clicks(chopping_detector, 0, 10, seed=1)
    assert freq[0] == 1.0


def test_posterior_normalized(mixture_input, chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    prior = prior_probabilities(mixture_input, 2, bs)
    assert prior.sum() == pytest.approx(1.0, abs=1e-10)
    post = posterior_photons_given_clicks(chopping_detector, prior, 3)
    assert post.sum() == pytest.approx(1.0)
    assert np.all(post[:3] == 0.0)
    assert click_distribution(chopping_detector, prior).sum() == pytest.approx(1.0, abs=1e-10)


def test_posterior_ideal_detector_is_sharp():
    bs = BeamSplitterParams.from_transmissivity(0.5)
    prior = prior_probabilities(FockVector.basis(2, 3), 1, bs)
    post = posterior_photons_given_clicks(DetectorModel(N=4000), prior, 1)
    assert post[1] > 0.99


def test_unreachable_click_counts():
    bs = BeamSplitterParams.from_transmissivity(0.5)
    prior = prior_probabilities(FockVector.basis(0, 1), 0, bs)
    det = DetectorModel(N=4)
    with pytest.raises(UnreachableOutcomeError):
        posterior_photons_given_clicks(det, prior, 1)
    with pytest.raises(UnreachableOutcomeError):
        posterior_photons_given_clicks(det, prior, 5)
    assert evidence(det, prior, 5) == 0.0


def test_binomial_mixture_moments():
    mix = binomial_mixture(4, 0.95)
    assert mix.mean == pytest.approx(3.8)
    assert mix.variance == pytest.approx(0.19)


@pytest.mark.parametrize("n0, p", [(-1, 0.5), (4, 0.0), (4, 1.0)])
def test_binomial_mixture_rejects(n0, p):
    with pytest.raises(ParameterError):
        binomial_mixture(n0, p)


def test_mixture_weights_must_sum_to_one():
    with pytest.raises(ParameterError):
        FockMixture(np.array([0.5, 0.4]))


def test_realistic_conditioning_probability(mixture_input, chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    mix = binomial_mixture(4, 0.95)
    ens = mixed_conditional_output(mixture_input, mix, bs, chopping_detector, 4)
    assert ens.total_probability == pytest.approx(0.13366, abs=1e-4)
    assert ens.total_weight == pytest.approx(1.0)
    assert total_click_probability(mixture_input, mix, bs, chopping_detector, 4) == pytest.approx(
        ens.total_probability, rel=1e-12)
    assert {n for n, _, _ in members_by_count(ens)} <= set(range(5))


def test_realistic_probability_matches_closed_form_sum(chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    beta = CoherentParams(2.3)
    state = coherent_state(beta, default_dim(2.3))
    mix = binomial_mixture(4, 0.95)
    numeric = total_click_probability(state, mix, bs, chopping_detector, 4)
    assert closed_click_probability(beta, mix, bs, chopping_detector, 4) == pytest.approx(numeric, abs=1e-9)


def test_joint_weighting_keeps_total(mixture_input, chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    mix = binomial_mixture(4, 0.95)
    a = mixed_conditional_output(mixture_input, mix, bs, chopping_detector, 4)
    b = mixed_conditional_output(mixture_input, mix, bs, chopping_detector, 4, joint_weights=True)
    assert b.total_probability == pytest.approx(a.total_probability)
    assert b.total_weight == pytest.approx(1.0)


def test_single_member_ensemble():
    bs = BeamSplitterParams.from_transmissivity(0.81)
    state = coherent_state(CoherentParams(1.2), default_dim(1.2, 2, 0))
    ens = mixed_conditional_output(state, fock_mixture(2), bs, DetectorModel(N=3), 0)
    assert len(ens.members) == 1
    only = jp_state_general(state, ConditionalIndices(2, 0), bs).state
    np.testing.assert_allclose(ensemble_observables(ens, "photon_dist"), only.probabilities, atol=1e-14)
    spec = QuadratureSpec(0.3, np.linspace(-5, 5, 41))
    np.testing.assert_allclose(ensemble_observables(ens, "quadrature", spec=spec),
                               quadrature_dist_numeric(only, spec), atol=1e-12)
    xs, ps = phase_grid(4.0, 21)
    np.testing.assert_allclose(ensemble_observables(ens, "wigner", xs=xs, ps=ps),
                               wigner_grid(only, xs, ps), atol=1e-12)


def test_ensemble_observable_errors(mixture_input):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    ens = mixed_conditional_output(mixture_input, fock_mixture(1), bs, DetectorModel(N=3), 1)
    with pytest.raises(ParameterError):
        ensemble_observables(ens, "quadrature")
    with pytest.raises(ParameterError):
        ensemble_observables(ens, "wigner")
    with pytest.raises(ParameterError):
        ensemble_observables(ens, "entropy")


def test_mixture_wigner_normalized(mixture_input, chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    ens = mixed_conditional_output(mixture_input, binomial_mixture(4, 0.95), bs, chopping_detector, 4)
    rho = ensemble_density(ens)
    assert np.trace(rho).real == pytest.approx(1.0)
    xs, ps = phase_grid(7.0, 141)
    W = ensemble_observables(ens, "wigner", xs=xs, ps=ps)
    assert trapezoid(trapezoid(W, ps, axis=1), xs) == pytest.approx(1.0, abs=1e-6)


def test_no_ancilla_component_reaches_clicks():
    bs = BeamSplitterParams.from_transmissivity(0.5)
    with pytest.raises(UnreachableOutcomeError):
        mixed_conditional_output(FockVector.basis(0, 1), fock_mixture(0), bs, DetectorModel(N=4), 2)


def test_binomial_mixture_poisson_limit():
    mix = binomial_mixture(500, 0.001)
    k = np.arange(len(mix.weights))
    distance = 0.5 * np.abs(mix.weights - poisson.pmf(k, 0.5)).sum() + 0.5 * poisson.sf(k[-1], 0.5)
    assert distance < 0.01


def test_mixture_wigner_averages_members(mixture_input, chopping_detector):
    bs = BeamSplitterParams.from_transmissivity(0.81)
    ens = mixed_conditional_output(mixture_input, binomial_mixture(4, 0.95), bs, chopping_detector, 4)
    xs, ps = phase_grid(4.0, 21)
    mixed = ensemble_observables(ens, "wigner", xs=xs, ps=ps)
    members = [wigner_grid(mb.state, xs, ps) for mb in ens.members]
    np.testing.assert_allclose(mixed, sum(mb.weight * w for mb, w in zip(ens.members, members)), atol=1e-10)
    assert min(w.min() for w in members) < 0
    assert mixed.min() >= min(w.min() for w in members)
