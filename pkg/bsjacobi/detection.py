#!/usr/bin/env python3
"""
detection.py

Realistic conditioning: photon-chopping detectors with finite efficiency,
the Bayes posterior over the true photon count, binomial Fock-state
ancilla mixtures and the resulting conditional ensembles.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.stats import binom

from .beamsplitter import probability_map
from .exceptions import ParameterError, UnreachableOutcomeError
from .fock import FockVector
from .jpstates import jp_state_general
from .phasespace import density_grid, quadrature_dist_numeric
from .protocols import GridExecutor
from .types import (
    DEFAULT_TOLERANCES,
    BeamSplitterParams,
    ConditionalEnsemble,
    ConditionalIndices,
    DetectorModel,
    EnsembleMember,
    FockMixture,
    QuadratureSpec,
    Tolerances,
)

logger = logging.getLogger(__name__)

MEMBER_CUTOFF = 1e-14


@lru_cache(maxsize=64)
def _chopping_exact(N: int, m_max: int) -> tuple:
    rows = []
    for k in range(N + 1):
        row = []
        for m in range(m_max + 1):
            if k > m:
                row.append(0.0)
                continue
            # surjections of m photons onto k chosen ports
            onto = sum((-1) ** l * math.comb(k, l) * (k - l) ** m for l in range(k + 1))
            row.append(float(Fraction(math.comb(N, k) * onto, N ** m)))
        rows.append(tuple(row))
    return tuple(rows)


def chopping_matrix(N: int, m_max: int) -> np.ndarray:
    """P_N(k|m) = N^{-m} C(N,k) sum_l (-1)^l C(k,l) (k-l)^m, rows k = 0..N, columns m = 0..m_max.

    The alternating sum is carried out in exact integer arithmetic.
    """
    if N < 1:
        raise ParameterError(f"detector needs N >= 1, got {N}")
    if m_max < 0:
        raise ParameterError(f"m_max must be >= 0, got {m_max}")
    return np.array(_chopping_exact(N, m_max))


def loss_matrix(eta: float, m_max: int) -> np.ndarray:
    """M[l, m] = C(m,l) eta^l (1-eta)^{m-l}."""
    if not 0.0 < eta <= 1.0:
        raise ParameterError(f"efficiency must lie in (0, 1], got {eta}")
    l = np.arange(m_max + 1)[:, None]
    m = np.arange(m_max + 1)[None, :]
    return binom.pmf(l, m, eta)


def click_given_photons(det: DetectorModel, m_max: int) -> np.ndarray:
    """P_{N,eta}(k|m) = sum_l P_N(k|l) M[l, m]; rows k = 0..N."""
    return chopping_matrix(det.N, m_max) @ loss_matrix(det.eta, m_max)


def prior_probabilities(input_state: FockVector, n: int, bs: BeamSplitterParams,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """P(n, m) over every reachable m = 0..input.dim + n - 1."""
    return probability_map(input_state, n, bs, input_state.dim + n - 1, tolerances)


def click_distribution(det: DetectorModel, prior: np.ndarray) -> np.ndarray:
    """Evidence P_{N,eta}(n, k) for every k."""
    prior = np.asarray(prior, dtype=float)
    return click_given_photons(det, len(prior) - 1) @ prior


def evidence(det: DetectorModel, prior: np.ndarray, k: int) -> float:
    if k > det.N:
        return 0.0
    return float(click_distribution(det, prior)[k])


def posterior_photons_given_clicks(det: DetectorModel, prior: np.ndarray, k: int,
                                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Bayes rule P(n, m|k) = P(k|m) P(n, m) / P(n, k), over m.

    Args:
        det: Detector model
        prior: P(n, m) for m = 0..len-1, e.g. from prior_probabilities
        k: Number of clicks

    Returns:
        np.ndarray: Posterior over m, summing to 1

    Raises:
        UnreachableOutcomeError: If the evidence for k clicks vanishes
    """
    prior = np.asarray(prior, dtype=float)
    if k < 0 or k > det.N:
        raise UnreachableOutcomeError(f"{k} clicks impossible with N={det.N} diodes")
    likelihood = click_given_photons(det, len(prior) - 1)[k]
    joint = likelihood * prior
    total = float(joint.sum())
    if total < tolerances.unreachable:
        raise UnreachableOutcomeError(f"k={k} clicks is unreachable for this input")
    return joint / total


def binomial_mixture(n0: int, p: float) -> FockMixture:
    """p_n = C(n0, n) p^n (1-p)^{n0-n} for n = 0..n0."""
    if n0 < 0:
        raise ParameterError(f"n0 must be >= 0, got {n0}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    w = binom.pmf(np.arange(n0 + 1), n0, p)
    return FockMixture(w / w.sum())


def fock_mixture(n: int) -> FockMixture:
    """Pure ancilla |n><n| as a degenerate mixture."""
    w = np.zeros(n + 1)
    w[n] = 1.0
    return FockMixture(w)


def mixed_conditional_output(input_state: FockVector, mix: FockMixture, bs: BeamSplitterParams,
                             det: DetectorModel, k: int, joint_weights: bool = False,
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalEnsemble:
    """Conditional ensemble of |Psi_{n,m}> for a mixed Fock ancilla and k clicks.

    Members are weighted by p_n P_{N,eta}(n, m|k); with joint_weights the
    weight is p_n P(k|m) P(n, m)/P_{N,eta}(k) instead. total_probability is
    P_{N,eta}(k) = sum_n p_n sum_m P(k|m) P(n, m) in both cases.

    Raises:
        UnreachableOutcomeError: If no ancilla component can produce k clicks
    """
    ensemble = ConditionalEnsemble()
    total = 0.0
    for n, pn in enumerate(mix.weights):
        if pn <= 0.0:
            continue
        prior = prior_probabilities(input_state, n, bs, tolerances)
        likelihood = click_given_photons(det, len(prior) - 1)[k] if k <= det.N else np.zeros(len(prior))
        joint = likelihood * prior
        ev = float(joint.sum())
        total += pn * ev
        if ev < tolerances.unreachable:
            logger.debug(f"ancilla n={n} cannot produce k={k} clicks")
            continue
        weights = pn * (joint if joint_weights else joint / ev)
        for m in np.flatnonzero(weights > MEMBER_CUTOFF * weights.max()):
            outcome = jp_state_general(input_state, ConditionalIndices(n, int(m)), bs, tolerances)
            ensemble.members.append(EnsembleMember(float(weights[m]), outcome.state, n, int(m)))
    if total < tolerances.unreachable or not ensemble.members:
        raise UnreachableOutcomeError(f"k={k} clicks is unreachable for every ancilla component")
    norm = ensemble.total_weight
    for member in ensemble.members:
        member.weight /= norm
    ensemble.total_probability = total
    logger.info(f"k={k}: P={total:.6g} over {len(ensemble.members)} ensemble members")
    return ensemble


def _ensemble_dim(ens: ConditionalEnsemble) -> int:
    return max(mb.state.dim for mb in ens.members)


def ensemble_density(ens: ConditionalEnsemble) -> np.ndarray:
    dim = _ensemble_dim(ens)
    rho = np.zeros((dim, dim), dtype=complex)
    for mb in ens.members:
        a = mb.state.resized(dim).amps
        rho += mb.weight * np.outer(a, a.conj())
    return rho


def ensemble_observables(ens: ConditionalEnsemble, observable: str, spec: Optional[QuadratureSpec] = None,
                         xs: Optional[np.ndarray] = None, ps: Optional[np.ndarray] = None,
                         executor: Optional[GridExecutor] = None) -> np.ndarray:
    """Weighted observable of the ensemble: photon_dist, quadrature or wigner.

    Raises:
        ParameterError: On an unknown observable or missing grid
    """
    if observable == "photon_dist":
        dim = _ensemble_dim(ens)
        return sum(mb.weight * mb.state.resized(dim).probabilities for mb in ens.members)
    if observable == "quadrature":
        if spec is None:
            raise ParameterError("quadrature observable needs a QuadratureSpec")
        return sum(mb.weight * quadrature_dist_numeric(mb.state, spec) for mb in ens.members)
    if observable == "wigner":
        if xs is None or ps is None:
            raise ParameterError("wigner observable needs x and p axes")
        return density_grid(ensemble_density(ens), xs, ps, executor)
    raise ParameterError(f"unknown observable {observable!r}")


def monte_carlo_clicks(det: DetectorModel, m: int, samples: int, seed: int) -> np.ndarray:
    """Sampled click frequencies for m incident photons, k = 0..N.

    Each photon survives with probability eta and lands on a uniformly
    random port; k counts the occupied ports.
    """
    if m < 0 or samples < 1:
        raise ParameterError("need m >= 0 and samples >= 1")
    rng = np.random.default_rng(seed)
    counts = np.zeros(det.N + 1)
    if m == 0:
        counts[0] = 1.0
        return counts
    detected = rng.binomial(m, det.eta, size=samples)
    ports = rng.integers(0, det.N, size=(samples, m))
    alive = np.arange(m)[None, :] < detected[:, None]
    hit = np.zeros((samples, det.N), dtype=bool)
    rows = np.broadcast_to(np.arange(samples)[:, None], ports.shape)
    hit[rows[alive], ports[alive]] = True
    clicks = hit.sum(axis=1)
    return np.bincount(clicks, minlength=det.N + 1) / samples


def total_click_probability(input_state: FockVector, mix: FockMixture, bs: BeamSplitterParams,
                            det: DetectorModel, k: int,
                            tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """P_{N,eta}(k) without building the ensemble."""
    total = 0.0
    for n, pn in enumerate(mix.weights):
        if pn > 0.0:
            total += pn * evidence(det, prior_probabilities(input_state, n, bs, tolerances), k)
    return total


def members_by_count(ens: ConditionalEnsemble) -> Sequence[tuple]:
    """(n, m, weight) rows for tabular output."""
    return [(mb.n, mb.m, mb.weight) for mb in ens.members]
