#!/usr/bin/env python3
"""
verification.py

Self-check suites comparing the closed forms against the two-mode
oracle and the generic evaluators. Each suite returns a SuiteReport with
the largest deviation seen per check.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Iterable

import numpy as np

from .beamsplitter import oracle_conditional, probability_map
from .detection import (
    binomial_mixture,
    click_distribution,
    click_given_photons,
    mixed_conditional_output,
    prior_probabilities,
)
from .exceptions import ParameterError, UnreachableOutcomeError
from .fock import FockVector, coherent_state, default_dim, default_dim_squeezed, squeezed_vacuum
from .jpstates import (
    jacobi_operator_residual,
    jp_state_general,
    jp_state_jacobi_form,
    psjp_pajp_coherent,
    psjp_pajp_squeezed,
)
from .numerics import laguerre
from .statistics import (
    _chi2_scaled,
    chi2_series,
    kummer_series,
    photon_stats_closed,
    photon_stats_numeric,
    probability_closed_coherent,
)
from .types import (
    BeamSplitterParams,
    CheckResult,
    CoherentParams,
    ConditionalIndices,
    DetectorModel,
    FockMixture,
    SqueezeParams,
    SuiteReport,
)

logger = logging.getLogger(__name__)

FIDELITY_TOL = 1e-9
PROBABILITY_TOL = 1e-9
TRANSMISSIVITIES = (0.4, 0.81)
MAX_N, MAX_M = 4, 6
# k = 4 clicks, N = 20, eta = 0.9, binomial(4, 0.95) ancilla, |beta| = 2.3, |T|^2 = 0.81
MIXTURE_CLICK_PROBABILITY = 0.13366


class _Tracker:
    """Keeps the worst deviation per named check."""

    def __init__(self):
        self.worst: Dict[str, float] = {}
        self.tolerance: Dict[str, float] = {}

    def record(self, name: str, deviation: float, tolerance: float) -> None:
        deviation = float(deviation)
        if math.isnan(deviation):
            deviation = math.inf
        self.tolerance[name] = tolerance
        self.worst[name] = max(self.worst.get(name, 0.0), deviation)

    def report(self, suite: str) -> SuiteReport:
        rep = SuiteReport(suite)
        for name, dev in self.worst.items():
            tol = self.tolerance[name]
            rep.checks.append(CheckResult(name, dev, tol, dev <= tol))
            if dev > tol:
                logger.warning(f"[{suite}] {name}: deviation {dev:.3e} exceeds {tol:.1e}")
        return rep


def _oracle_inputs(quick: bool):
    betas = (2.3,) if quick else (0.5, 2.3)
    squeezes = (0.3,) if quick else (0.3, 0.8)
    for b in betas:
        dim = default_dim(b, MAX_N, MAX_M)
        yield f"coherent{b}", coherent_state(CoherentParams(b), dim), ("coherent", CoherentParams(b))
    for r in squeezes:
        p = SqueezeParams(r)
        yield f"squeezed{r}", squeezed_vacuum(p, default_dim_squeezed(p, MAX_N, MAX_M)), ("squeezed", p)
    for k in range(4):
        yield f"fock{k}", FockVector.basis(k, k + 1), ("fock", None)


def _indices(quick: bool) -> Iterable[ConditionalIndices]:
    ns = (0, 2, 3) if quick else range(MAX_N + 1)
    ms = (0, 2, 3) if quick else range(MAX_M + 1)
    for n in ns:
        for m in ms:
            yield ConditionalIndices(n, m)


def suite_oracle(quick: bool = False) -> SuiteReport:
    """Every closed-form constructor against the two-mode oracle."""
    track = _Tracker()
    for t2 in TRANSMISSIVITIES:
        bs = BeamSplitterParams.from_transmissivity(t2)
        for label, state, (kind, params) in _oracle_inputs(quick):
            for idx in _indices(quick):
                try:
                    ref = oracle_conditional(state, idx, bs)
                except UnreachableOutcomeError:
                    try:
                        jp_state_general(state, idx, bs)
                        track.record("unreachable-agreement", 1.0, 0.0)
                    except UnreachableOutcomeError:
                        track.record("unreachable-agreement", 0.0, 0.0)
                    continue
                candidates = {
                    "general": jp_state_general(state, idx, bs),
                    "jacobi": jp_state_jacobi_form(state, idx, bs),
                }
                if kind == "coherent":
                    candidates["coherent"] = psjp_pajp_coherent(params, idx, bs, state.dim + idx.n)
                elif kind == "squeezed":
                    candidates["squeezed"] = psjp_pajp_squeezed(params, idx, bs, state.dim + idx.n)
                    odd = ref.state.amps[(idx.nu + 1) % 2::2]
                    track.record("parity-oracle", float(np.max(np.abs(odd), initial=0.0)), 1e-12)
                    closed = candidates["squeezed"].state.amps[(idx.nu + 1) % 2::2]
                    track.record("parity-closed", float(np.max(np.abs(closed), initial=0.0)), 0.0)
                for name, out in candidates.items():
                    track.record(f"fidelity-{name}", 1.0 - ref.state.fidelity(out.state), FIDELITY_TOL)
                    track.record(f"probability-{name}", abs(ref.probability - out.probability), PROBABILITY_TOL)
    logger.info("oracle suite finished")
    return track.report("oracle")


def suite_appendix_a(quick: bool = False) -> SuiteReport:
    """Jacobi operator identity on number states."""
    track = _Tracker()
    t2s = (0.4, 0.81) if quick else (0.1, 0.4, 0.5, 0.81, 0.9999)
    for t2 in t2s:
        for l in range(7):
            for abs_nu in range(5):
                for mu in (0, abs_nu):
                    track.record("jacobi-identity", jacobi_operator_residual(l, abs_nu, mu, t2), 1e-10)
    return track.report("appendixA")


def suite_appendix_b(quick: bool = False) -> SuiteReport:
    """Closed-form photon statistics against Fock-amplitude sums."""
    track = _Tracker()
    beta = CoherentParams(2.07 / 0.9)
    for t2 in TRANSMISSIVITIES:
        bs = BeamSplitterParams.from_transmissivity(t2)
        for idx in _indices(quick):
            closed = photon_stats_closed(beta, idx, bs)
            numeric = photon_stats_numeric(psjp_pajp_coherent(beta, idx, bs, len(closed.distribution)).state)
            track.record("mean", abs(closed.mean - numeric.mean), 1e-9 * max(1.0, numeric.mean))
            track.record("second-moment", abs(closed.second_moment - numeric.second_moment),
                         1e-9 * max(1.0, numeric.second_moment))
            track.record("distribution-sum", abs(closed.distribution.sum() - 1.0), 1e-9)
    return track.report("appendixB")


def suite_appendix_c(quick: bool = False) -> SuiteReport:
    """Event-probability closed form, chi2 kernels and the Kummer identities."""
    track = _Tracker()
    betas = (1.0, 2.3) if quick else (0.5, 1.0, 2.3, 3.0)
    for t2 in TRANSMISSIVITIES:
        bs = BeamSplitterParams.from_transmissivity(t2)
        for b in betas:
            state = coherent_state(CoherentParams(b), default_dim(b, MAX_N, MAX_M))
            for n in range(MAX_N + 1):
                probs = probability_map(state, n, bs, MAX_M)
                for m in range(MAX_M + 1):
                    closed = probability_closed_coherent(CoherentParams(b), ConditionalIndices(n, m), bs)
                    track.record("probability-closed", abs(closed - probs[m]), PROBABILITY_TOL)
    for nu in range(-4, 5):
        for k in range(max(0, nu), 7):
            for j in range(max(0, nu), 7):
                for x in (0.25, 1.0, 4.0, 9.0):
                    series = chi2_series(k, j, nu, x)
                    lag = math.exp(x) * _chi2_scaled(k, j, nu, x)
                    track.record("chi2-branches", abs(series - lag) / series, 1e-10)
    for a in (-3.0, -1.5, 0.5, 2.0):
        for b in (0.5, 1.0, 3.0):
            for z in (0.3, 1.7):
                lhs = kummer_series(a, b, z)
                rhs = math.exp(z) * kummer_series(b - a, b, -z)
                track.record("kummer-transform", abs(lhs - rhs) / max(abs(lhs), 1e-300), 1e-10)
    for n in range(6):
        for b in (0.0, 1.0, 2.5):
            for z in (0.3, 2.0):
                scale = math.exp(math.lgamma(n + b + 1) - math.lgamma(n + 1) - math.lgamma(b + 1))
                track.record("kummer-laguerre",
                             abs(scale * kummer_series(-n, b + 1, z) - laguerre(n, b, z)), 1e-10)
    return track.report("appendixC")


def suite_detection(quick: bool = False) -> SuiteReport:
    """Stochasticity of the detector model and the realistic-conditioning probability."""
    track = _Tracker()
    det = DetectorModel(N=20, eta=0.9)
    cols = click_given_photons(det, 30).sum(axis=0)
    track.record("column-stochastic", float(np.max(np.abs(cols - 1.0))), 1e-12)
    bs = BeamSplitterParams.from_transmissivity(0.81)
    beta = CoherentParams(2.07 / 0.9)
    state = coherent_state(beta, default_dim(abs(beta.beta)))
    prior = prior_probabilities(state, 4, bs)
    track.record("evidence-sum", abs(click_distribution(det, prior).sum() - 1.0), 1e-10)
    mix = binomial_mixture(4, 0.95)
    ens = mixed_conditional_output(state, mix, bs, det, 4)
    track.record("mixture-probability", abs(ens.total_probability - MIXTURE_CLICK_PROBABILITY), 1e-4)
    track.record("mixture-probability-closed",
                 abs(ens.total_probability - closed_click_probability(beta, mix, bs, det, 4)), 1e-9)
    track.record("ensemble-weights", abs(ens.total_weight - 1.0), 1e-9)
    return track.report("detection")


def closed_click_probability(beta: CoherentParams, mix: FockMixture, bs: BeamSplitterParams,
                             det: DetectorModel, k: int, m_max: int = 30) -> float:
    """sum_n p_n sum_m P(k|m) P(n, m) with P(n, m) from the closed form."""
    likelihood = click_given_photons(det, m_max)[k]
    total = 0.0
    for n, pn in enumerate(mix.weights):
        for m in range(k, m_max + 1):
            total += pn * likelihood[m] * probability_closed_coherent(beta, ConditionalIndices(n, m), bs)
    return total


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "oracle": suite_oracle,
    "appendixA": suite_appendix_a,
    "appendixB": suite_appendix_b,
    "appendixC": suite_appendix_c,
    "detection": suite_detection,
}


def run_suite(name: str, quick: bool = False) -> SuiteReport:
    """Run a named suite.

    Raises:
        ParameterError: If the suite name is unknown
    """
    try:
        fn = SUITES[name]
    except KeyError as e:
        raise ParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from e
    logger.info(f"running verification suite {name}{' (quick)' if quick else ''}")
    return fn(quick=quick)
