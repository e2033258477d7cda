#!/usr/bin/env python3
"""
statistics.py

Photon-number statistics of coherent-input PSJP/PAJP states and the
closed-form event probability P(n, m), with the series and Laguerre
kernels they are built from.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .exceptions import ParameterError
from .fock import FockVector, default_dim
from .jpstates import chi1, coherent_ket_coefficients, coherent_normalization, psjp_pajp_coherent
from .numerics import binomial, laguerre
from .types import DEFAULT_TOLERANCES, BeamSplitterParams, CoherentParams, ConditionalIndices, PhotonStats, Tolerances

logger = logging.getLogger(__name__)


def mandel_q(mean: float, second_moment: float) -> float:
    """(<n^2> - <n>^2)/<n> - 1; NaN for the vacuum."""
    if mean <= 0.0:
        return float("nan")
    return (second_moment - mean ** 2) / mean - 1.0


def photon_stats_numeric(v: FockVector) -> PhotonStats:
    """Statistics read directly off the Fock amplitudes."""
    dist = v.probabilities / v.norm_squared
    l = np.arange(v.dim, dtype=float)
    mean = float(np.dot(l, dist))
    second = float(np.dot(l * l, dist))
    return PhotonStats(distribution=dist, mean=mean, second_moment=second, mandel_q=mandel_q(mean, second))


def antinormal_moment(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams, p: int) -> float:
    """<a^p (a^dag)^p> = (1/N') sum_{l,l'} d_l d_l'^* chi1_{l'+p, l+p}(beta')."""
    beta_p = bs.T * beta.beta
    d = coherent_ket_coefficients(beta_p, idx, bs)
    total = 0.0 + 0j
    for l, dl in d.items():
        for lp, dlp in d.items():
            total += dl * dlp.conjugate() * chi1(lp + p, l + p, beta_p)
    return float(total.real) / coherent_normalization(beta, idx, bs)


def photon_stats_closed(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams,
                        dim: Optional[int] = None,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> PhotonStats:
    """Distribution from the closed-form amplitudes, moments from the antinormal kernels.

    <n> = <a a^dag> - 1 and <n^2> = <a^2 a^dag^2> - 3 <a a^dag> + 1.
    """
    if dim is None:
        dim = default_dim(abs(bs.T * beta.beta), idx.n, idx.m, tolerances)
    outcome = psjp_pajp_coherent(beta, idx, bs, dim, tolerances)
    a1 = antinormal_moment(beta, idx, bs, 1)
    a2 = antinormal_moment(beta, idx, bs, 2)
    mean = a1 - 1.0
    second = a2 - 3.0 * a1 + 1.0
    logger.debug(f"photon stats n={idx.n} m={idx.m}: <n>={mean:.6g} <n^2>={second:.6g}")
    return PhotonStats(
        distribution=outcome.state.probabilities,
        mean=mean,
        second_moment=second,
        mandel_q=mandel_q(mean, second),
    )


def chi2_series(k: int, j: int, nu: int, x: float, tolerances: Tolerances = DEFAULT_TOLERANCES,
                max_terms: int = 100000) -> float:
    """sum_{p >= max(0,-nu)} C(p+k,k) C(p+j,j) x^p/(p+nu)!, cut once terms fall below series_cut."""
    if x < 0:
        raise ParameterError(f"x must be >= 0, got {x}")
    start = max(0, -nu)
    total = 0.0
    for p in range(start, start + max_terms):
        if x == 0.0 and p > 0:
            break
        log_t = math.lgamma(p + nu + 1)
        term = binomial(p + k, k) * binomial(p + j, j) * math.exp(
            (p * math.log(x) if p else 0.0) - log_t)
        total += term
        if p > x and term < tolerances.series_cut * total:
            break
    return total


def _chi2_scaled(k: int, j: int, nu: int, x: float) -> float:
    """e^{-x} chi2_{k,j}(x) in Laguerre form.

    nu >= 0: (j-nu)!/j! sum_l C(k,l) x^l/l! L_{j-nu}^{nu+l}(-x)
    nu <  0: x^{|nu|} sum_l C(k,l) (j+l)!/(l! j!) L_{j+l}^{|nu|-l}(-x)
    """
    total = 0.0
    if nu >= 0:
        if j < nu:
            raise ParameterError(f"chi2 needs j >= nu, got j={j}, nu={nu}")
        pre = math.exp(math.lgamma(j - nu + 1) - math.lgamma(j + 1))
        for l in range(k + 1):
            total += binomial(k, l) * x ** l / math.factorial(l) * laguerre(j - nu, float(nu + l), -x)
        return pre * total
    for l in range(k + 1):
        c = binomial(k, l) * math.exp(math.lgamma(j + l + 1) - math.lgamma(l + 1) - math.lgamma(j + 1))
        total += c * laguerre(j + l, float(-nu - l), -x)
    return x ** (-nu) * total


def chi2_laguerre(k: int, j: int, nu: int, x: float) -> float:
    return math.exp(x) * _chi2_scaled(k, j, nu, x)


def probability_closed_coherent(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams) -> float:
    """P(n, m) for coherent input.

    P = e^{-|b|^2} |R|^{-2nu} n!/(|T|^{2m} m!)
        sum_{k,j=mu}^{n} (-|R|^2)^{k+j} C(m,k-nu) C(m,j-nu) chi2_{k,j}(|b'|^2)
    """
    n, m, nu, mu = idx.n, idx.m, idx.nu, idx.mu
    t2, r2 = bs.t2, bs.r2
    if t2 <= 0.0:
        raise ParameterError("closed-form probability needs |T| > 0")
    b2 = abs(beta.beta) ** 2
    x = t2 * b2
    total = 0.0
    for k in range(mu, n + 1):
        for j in range(mu, n + 1):
            coeff = (-1) ** (k + j) * r2 ** (k + j - nu) * binomial(m, k - nu) * binomial(m, j - nu)
            if coeff == 0.0:
                continue
            total += coeff * _chi2_scaled(k, j, nu, x)
    # e^{-|b|^2} e^{x} = e^{-|R|^2 |b|^2}
    log_pre = -r2 * b2 + math.lgamma(n + 1) - math.lgamma(m + 1) - m * math.log(t2)
    return math.exp(log_pre) * total


def kummer_series(a: float, b: float, z: float, tolerances: Tolerances = DEFAULT_TOLERANCES,
                  max_terms: int = 10000) -> float:
    """Confluent hypergeometric 1F1(a; b; z) by direct summation."""
    if b <= 0 and float(b).is_integer():
        raise ParameterError(f"1F1 undefined for b={b}")
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if term == 0.0 or (k > abs(z) and abs(term) < tolerances.series_cut * abs(total)):
            break
    return total
