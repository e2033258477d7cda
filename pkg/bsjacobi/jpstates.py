#!/usr/bin/env python3
"""
jpstates.py

Closed-form constructors for photon-subtracted (PSJP) and photon-added
(PAJP) Jacobi-polynomial states and the related state families:
photon-added coherent states, crescent states, squeezed Fock
superpositions and squeezed-state excitations.

Conditional constructors return a ConditionalOutcome carrying the
normalized state, the normalization constant N_{n,m} of the unnormalized
sum and the event probability P(n, m).
"""

from __future__ import annotations

import cmath
import logging
import math
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import gammaln

from .exceptions import ParameterError, TruncationError, UnreachableOutcomeError
from .fock import (
    FockVector,
    apply_annihilation,
    apply_creation,
    apply_matrix,
    attenuate,
    coherent_state,
    displacement_matrix,
    squeeze_matrix,
    squeezed_amplitudes,
)
from .numerics import binomial, jacobi_poly, laguerre, scaled_power
from .types import (
    DEFAULT_TOLERANCES,
    BeamSplitterParams,
    CatComponents,
    CoherentParams,
    ConditionalIndices,
    ConditionalOutcome,
    SqueezeParams,
    Tolerances,
)

logger = logging.getLogger(__name__)


def probability_from_norm(norm: float, idx: ConditionalIndices, bs: BeamSplitterParams) -> float:
    """P(n, m) = m!/(n! |T|^{2m} |R|^{2 nu}) N_{n,m}."""
    t2, r2 = bs.t2, bs.r2
    if t2 <= 0.0:
        raise ParameterError("event probability needs |T| > 0")
    if r2 == 0.0:
        return 0.0 if idx.nu != 0 else norm / t2 ** idx.m
    log_p = math.lgamma(idx.m + 1) - math.lgamma(idx.n + 1) - idx.m * math.log(t2) - idx.nu * math.log(r2)
    return math.exp(log_p) * norm


def _outcome(amps: np.ndarray, norm: float, idx: ConditionalIndices, bs: BeamSplitterParams,
             tolerances: Tolerances) -> ConditionalOutcome:
    if norm < tolerances.unreachable:
        raise UnreachableOutcomeError(f"outcome (n={idx.n}, m={idx.m}) is unreachable")
    state = FockVector(amps, normalized=False).normalize()
    return ConditionalOutcome(
        state=state,
        probability=probability_from_norm(norm, idx, bs),
        n=idx.n,
        m=idx.m,
        norm=norm,
    )


def jp_state_general(input_state: FockVector, idx: ConditionalIndices, bs: BeamSplitterParams,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Conditional state as the finite ladder-operator sum.

    sum_{k=mu}^{n} (-|R|^2)^k/(k-nu)! C(n,k) a^{k-nu} (a^dag)^k T^n |Phi>,
    applied termwise: a^{k-nu}(a^dag)^k|q> = (q+k)!/sqrt(q!(q+nu)!) |q+nu>.
    """
    phi = input_state if input_state.normalized else input_state.normalize()
    v = attenuate(phi, bs.T, normalize=False)
    n, nu, mu = idx.n, idx.nu, idx.mu
    r2 = bs.r2
    q = np.arange(v.dim, dtype=float)
    valid = q + nu >= 0
    qv = q[valid]
    coef = np.zeros(len(qv))
    for k in range(mu, n + 1):
        weight = (-1) ** k * r2 ** k * binomial(n, k)
        if weight == 0.0:
            continue
        log_t = (gammaln(qv + k + 1) - 0.5 * gammaln(qv + 1) - 0.5 * gammaln(qv + nu + 1)
                 - gammaln(k - nu + 1))
        coef += weight * np.exp(log_t)
    amps = np.zeros(v.dim + max(nu, 0), dtype=complex)
    amps[(qv + nu).astype(int)] = coef * v.amps[valid]
    norm = float(np.sum(np.abs(amps) ** 2))
    return _outcome(amps, norm, idx, bs, tolerances)


def jacobi_scale(idx: ConditionalIndices, bs: BeamSplitterParams) -> float:
    """Ratio N_{n,m}/||Jacobi form||^2 between the sum and the Jacobi form."""
    if idx.nu > 0:
        return bs.r2 ** (2 * idx.nu)
    return math.exp(2.0 * (math.lgamma(idx.n + 1) - math.lgamma(idx.n - idx.nu + 1)))


def jp_state_jacobi_form(input_state: FockVector, idx: ConditionalIndices, bs: BeamSplitterParams,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Conditional state in Jacobi-polynomial operator form.

    nu <= 0: a^{|nu|} P_n^{(|nu|, n-m)}(2|T|^2-1) T^n |Phi>
    nu >  0: (a^dag)^nu P_m^{(nu, n-m)}(2|T|^2-1) T^n |Phi>
    where the beta parameter is the number operator minus m.
    """
    phi = input_state if input_state.normalized else input_state.normalize()
    v = attenuate(phi, bs.T, normalize=False)
    z = 2.0 * bs.t2 - 1.0
    q = np.arange(v.dim, dtype=float)
    nu = idx.nu
    if nu <= 0:
        poly = jacobi_poly(idx.n, float(-nu), q - idx.m, z)
        out = apply_annihilation(FockVector(poly * v.amps, normalized=False), -nu)
    else:
        poly = jacobi_poly(idx.m, float(nu), q - idx.m, z)
        out = apply_creation(FockVector(poly * v.amps, normalized=False), nu)
    norm = out.norm_squared * jacobi_scale(idx, bs)
    return _outcome(np.asarray(out.amps), norm, idx, bs, tolerances)


def jacobi_operator_residual(l: int, abs_nu: int, mu: int, t2: float, q_max: int = 40) -> float:
    """Largest relative residual of the Jacobi operator identity on |q>, q <= q_max.

    sum_k (-|R|^2)^k k!/(k+|nu|)! C(l,k) C(q+mu+k, k)
        = l!/(l+|nu|)! P_l^{(|nu|, q+mu-|nu|-l)}(2|T|^2-1)
    (the common factor T^q drops out).
    """
    r2 = 1.0 - t2
    q = np.arange(q_max + 1, dtype=float)
    terms = []
    for k in range(l + 1):
        log_t = (gammaln(k + 1) - gammaln(k + abs_nu + 1)
                 + gammaln(q + mu + k + 1) - gammaln(q + mu + 1) - gammaln(k + 1))
        terms.append((-r2) ** k * binomial(l, k) * np.exp(log_t))
    lhs = np.sum(terms, axis=0)
    scale = np.sum(np.abs(terms), axis=0)
    rhs = math.exp(math.lgamma(l + 1) - math.lgamma(l + abs_nu + 1)) * jacobi_poly(
        l, float(abs_nu), q + mu - abs_nu - l, 2.0 * t2 - 1.0)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(scale, np.abs(rhs))))


def chi1(l: int, k: int, alpha: complex) -> complex:
    """<alpha| a^l (a^dag)^k |alpha> as a Laguerre polynomial."""
    x = -abs(alpha) ** 2
    if l >= k:
        return math.factorial(k) * alpha ** (l - k) * laguerre(k, float(l - k), x)
    return math.factorial(l) * alpha.conjugate() ** (k - l) * laguerre(l, float(k - l), x)


def coherent_ket_coefficients(beta_p: complex, idx: ConditionalIndices, bs: BeamSplitterParams) -> Dict[int, complex]:
    """d_l with |Psi> proportional to sum_l d_l (a^dag)^l |beta'>, l = mu..n.

    d_l = beta'^{l-nu}/(l-nu)! sum_{k=l}^{n} (-|R|^2)^k C(n,k) C(k,l)
    """
    n, nu, mu = idx.n, idx.nu, idx.mu
    out = {}
    for l in range(mu, n + 1):
        c = sum((-bs.r2) ** k * binomial(n, k) * binomial(k, l) for k in range(l, n + 1))
        out[l] = c * scaled_power(beta_p, l - nu, -math.lgamma(l - nu + 1))
    return out


def coherent_normalization(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams) -> float:
    """N'_{n,m} = sum_{l,l'} d_l d_l'^* chi1_{l',l}(beta')."""
    beta_p = bs.T * beta.beta
    d = coherent_ket_coefficients(beta_p, idx, bs)
    total = 0.0 + 0j
    for l, dl in d.items():
        for lp, dlp in d.items():
            total += dl * dlp.conjugate() * chi1(lp, l, beta_p)
    return float(total.real)


def psjp_pajp_coherent(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams, dim: int,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Fock amplitudes of the coherent-input state, beta' = T beta.

    A_s = e^{-|b'|^2/2} b'^{s-nu} sqrt(s!) sum_k (-|R|^2)^k C(n,k)
          sum_{l=mu}^{min(k,s)} C(k,l)/((l-nu)! (s-l)!)
    normalized with the analytic N'.
    """
    beta_p = bs.T * beta.beta
    n, nu, mu = idx.n, idx.nu, idx.mu
    ck = {l: sum((-bs.r2) ** k * binomial(n, k) * binomial(k, l) for k in range(l, n + 1))
          for l in range(mu, n + 1)}
    amps = np.zeros(dim, dtype=complex)
    base = -0.5 * abs(beta_p) ** 2
    for s in range(mu, dim):
        acc = 0.0 + 0j
        for l in range(mu, min(n, s) + 1):
            if ck[l] == 0.0:
                continue
            log_t = base + 0.5 * math.lgamma(s + 1) - math.lgamma(l - nu + 1) - math.lgamma(s - l + 1)
            acc += ck[l] * scaled_power(beta_p, s - nu, log_t)
        amps[s] = acc
    norm_p = coherent_normalization(beta, idx, bs)
    if norm_p < tolerances.unreachable:
        raise UnreachableOutcomeError(f"outcome (n={idx.n}, m={idx.m}) is unreachable")
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)) / norm_p)
    if tail > tolerances.tail_mass * 1e2:
        raise TruncationError(f"dim={dim} too small for beta'={beta_p:.4g} (tail {tail:.3e})")
    # N_{n,m} refers to the normalized input |beta>: T^n|beta> = e^{-|R beta|^2/2}|beta'>
    norm = math.exp(-bs.r2 * abs(beta.beta) ** 2) * norm_p
    return _outcome(amps, norm, idx, bs, tolerances)


def psjp_pajp_coherent_laguerre(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams,
                                dim: int) -> FockVector:
    """Compact form L_{n-mu}^{|nu|}((|R|^2/|T|^2) b' a^dag) (b' a^dag)^mu |b'>, normalized."""
    beta_p = bs.T * beta.beta
    gamma = bs.r2 / bs.t2 * beta_p
    order, a = idx.n - idx.mu, float(abs(idx.nu))
    v = coherent_state(CoherentParams(beta_p), dim)
    v = FockVector(scaled_power(beta_p, idx.mu) * apply_creation(v, idx.mu).amps, normalized=False)
    total = np.zeros(v.dim + order, dtype=complex)
    for i in range(order + 1):
        c = math.exp(math.lgamma(order + a + 1) - math.lgamma(order - i + 1)
                     - math.lgamma(a + i + 1) - math.lgamma(i + 1)) * (-gamma) ** i
        total += c * apply_creation(v, i).resized(len(total)).amps
    return FockVector(total, normalized=False).normalize()


def _squeezed_terms(kappa_p: complex, idx: ConditionalIndices, bs: BeamSplitterParams, dim: int,
                    sign: int = 0) -> np.ndarray:
    """Raw amplitudes for the squeezed-input state (sign 0) or a cat component (sign +-1)."""
    n, nu, mu = idx.n, idx.nu, idx.mu
    amps = np.zeros(dim, dtype=complex)
    log_pre = 0.25 * math.log1p(-abs(kappa_p) ** 2)
    root = cmath.sqrt(kappa_p / 2.0)
    for p in range(mu, dim):
        h = p - nu
        if sign == 0 and h % 2:
            continue
        acc = 0.0 + 0j
        for k in range(mu, n + 1):
            w = (-1) ** k * bs.r2 ** k * binomial(n, k)
            if w == 0.0:
                continue
            log_t = (log_pre + math.lgamma(h + k + 1) - math.lgamma(k - nu + 1)
                     - math.lgamma(h / 2.0 + 1.0) - 0.5 * math.lgamma(p + 1))
            if sign == 0:
                acc += w * scaled_power(kappa_p / 2.0, h // 2, log_t)
            else:
                acc += w * scaled_power(sign * root, h, log_t)
        amps[p] = acc
    return amps


def psjp_pajp_squeezed(xi: SqueezeParams, idx: ConditionalIndices, bs: BeamSplitterParams, dim: int,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Fock amplitudes of the squeezed-vacuum-input state with kappa' = T^2 kappa.

    Only p with p - nu even are populated; the rest are exact zeros.
    """
    kappa_p = bs.T ** 2 * xi.kappa
    amps = _squeezed_terms(kappa_p, idx, bs, dim)
    tail = float(np.sum(np.abs(amps[-4:]) ** 2)) / max(float(np.sum(np.abs(amps) ** 2)), 1e-300)
    if tail > tolerances.tail_mass:
        raise TruncationError(f"dim={dim} too small for squeezed input (edge weight {tail:.3e})")
    norm_p = float(np.sum(np.abs(amps) ** 2))
    # T^n S(xi)|0> = ((1-|k|^2)/(1-|k'|^2))^{1/4} S(xi')|0>
    norm = math.sqrt((1.0 - abs(xi.kappa) ** 2) / (1.0 - abs(kappa_p) ** 2)) * norm_p
    return _outcome(amps, norm, idx, bs, tolerances)


def cat_split(xi: SqueezeParams, idx: ConditionalIndices, bs: BeamSplitterParams, dim: int) -> CatComponents:
    """Split the squeezed-input state into components built with +-sqrt(kappa'/2)."""
    kappa_p = bs.T ** 2 * xi.kappa
    plus = FockVector(_squeezed_terms(kappa_p, idx, bs, dim, sign=+1), normalized=False)
    minus = FockVector(_squeezed_terms(kappa_p, idx, bs, dim, sign=-1), normalized=False)
    degenerate = kappa_p == 0
    if degenerate:
        logger.info("kappa' = 0: cat components collapse to a single Fock state")
    return CatComponents(plus=plus.normalize(), minus=minus.normalize(), degenerate=degenerate)


def photon_added_coherent_displacedfock(beta: complex, n: int, dim: int) -> FockVector:
    """(a^dag)^n |beta> = sum_k C(n,k) sqrt(k!) (beta*)^{n-k} D(beta)|k>, normalized."""
    if n >= dim:
        raise TruncationError(f"n={n} does not fit in dim={dim}")
    D = displacement_matrix(beta, dim)
    amps = np.zeros(dim, dtype=complex)
    for k in range(n + 1):
        amps += binomial(n, k) * scaled_power(beta.conjugate(), n - k, 0.5 * math.lgamma(k + 1)) * D[:, k]
    return FockVector(amps, normalized=False).normalize()


def displaced_fock_from_photon_added(beta: complex, n: int, dim: int) -> FockVector:
    """D(beta)|n> = (n!)^{-1/2} sum_l C(n,l) (-beta*)^{n-l} (a^dag)^l |beta>."""
    coh = coherent_state(CoherentParams(beta), dim)
    total = np.zeros(dim + n, dtype=complex)
    for l in range(n + 1):
        term = apply_creation(coh, l).resized(dim + n).amps
        total += binomial(n, l) * scaled_power(-beta.conjugate(), n - l, -0.5 * math.lgamma(n + 1)) * term
    return FockVector(total, normalized=False).normalize()


def near_photon_number_state(beta: complex, n: int, dim: int) -> FockVector:
    """Crescent state D(-beta) (a^dag)^n |2 beta>, normalized."""
    work = dim + n
    v = apply_creation(coherent_state(CoherentParams(2.0 * beta), dim), n)
    out = apply_matrix(displacement_matrix(-beta, work), v)
    return out.normalize()


def near_photon_number_binomial(beta: complex, n: int, dim: int) -> FockVector:
    """(a^dag + beta*)^n |beta> by binomial expansion, normalized."""
    coh = coherent_state(CoherentParams(beta), dim)
    total = np.zeros(dim + n, dtype=complex)
    for k in range(n + 1):
        total += binomial(n, k) * scaled_power(beta.conjugate(), n - k) * apply_creation(coh, k).resized(dim + n).amps
    return FockVector(total, normalized=False).normalize()


def normal_order_coeffs(n: int, epsilon: complex) -> Dict[Tuple[int, int], complex]:
    """Normally ordered expansion of (a^dag + eps a)^n.

    Keys are (creation power, annihilation power):
    sum_l C(n,l) eps^{n-l} sum_k eps^k (2k)!/(2^k k!) C(l,2k) (a^dag)^{l-2k} a^{n-l}
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    table: Dict[Tuple[int, int], complex] = {}
    for l in range(n + 1):
        for k in range(l // 2 + 1):
            c = binomial(n, l) * binomial(l, 2 * k) * math.factorial(2 * k) / (2 ** k * math.factorial(k))
            table[(l - 2 * k, n - l)] = c * epsilon ** (n - l + k) if (n - l + k) else c + 0j
    return table


def apply_normal_ordered(table: Dict[Tuple[int, int], complex], v: FockVector) -> FockVector:
    width = v.dim + max((p for p, _ in table), default=0)
    total = np.zeros(width, dtype=complex)
    for (p, q), c in table.items():
        if c == 0:
            continue
        term = apply_creation(apply_annihilation(v, q), p)
        total += c * term.resized(width).amps
    return FockVector(total, normalized=False)


def photon_added_subtracted_squeezed_decomposition(xi: SqueezeParams, count: int, mode: str,
                                                   dim: int) -> List[Tuple[complex, FockVector]]:
    """Weights of S(xi)|count-2k> for (a^dag)^count S(xi)|0> or a^count S(xi)|0>.

    added:      (1-|k|^2)^{-n/2} n! k*^j/(2^j j! sqrt((n-2j)!))
    subtracted: k^m (1-|k|^2)^{-m/2} m! k^{-j}/(2^j j! sqrt((m-2j)!))
    """
    kappa = xi.kappa
    if mode not in ("added", "subtracted"):
        raise ParameterError(f"mode must be 'added' or 'subtracted', got {mode!r}")
    if mode == "subtracted" and kappa == 0:
        raise ParameterError("photon subtraction from the vacuum (kappa = 0) gives the zero vector")
    if count >= dim:
        raise TruncationError(f"count={count} does not fit in dim={dim}")
    S = squeeze_matrix(xi, dim)
    log_pre = -0.5 * count * math.log1p(-abs(kappa) ** 2) + math.lgamma(count + 1)
    eps = kappa.conjugate() if mode == "added" else 1.0 / kappa
    lead = 1.0 if mode == "added" else kappa ** count
    terms = []
    for j in range(count // 2 + 1):
        log_w = log_pre - j * math.log(2.0) - math.lgamma(j + 1) - 0.5 * math.lgamma(count - 2 * j + 1)
        weight = lead * scaled_power(eps, j, log_w)
        terms.append((complex(weight), FockVector(S[:, count - 2 * j], normalized=False)))
    return terms


def reconstruct(terms: List[Tuple[complex, FockVector]]) -> FockVector:
    width = max(v.dim for _, v in terms)
    total = sum(w * v.resized(width).amps for w, v in terms)
    return FockVector(total, normalized=False)


def _cut(v: FockVector, dim: int, tolerances: Tolerances) -> FockVector:
    lost = float(np.sum(np.abs(v.amps[dim:]) ** 2)) / v.norm_squared
    if lost > tolerances.leakage:
        raise TruncationError(f"state leaks {lost:.3e} past dim={dim}")
    return FockVector(v.amps[:dim], normalized=False).normalize()


def squeezed_state_excitation(beta: complex, xi: SqueezeParams, n: int, dim: int,
                              tolerances: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """D(beta) S^dag(xi) (a^dag)^n S(2 xi)|0>, normalized."""
    work = 2 * dim + n
    vac2 = FockVector(squeezed_amplitudes(xi.doubled().kappa, work), normalized=False)
    v = apply_creation(vac2, n, dim=work + n)
    v = apply_matrix(squeeze_matrix(SqueezeParams(-xi.xi), work + n), v)
    v = apply_matrix(displacement_matrix(beta, work + n), v)
    return _cut(v, dim, tolerances)


def squeezed_state_excitation_normal_ordered(beta: complex, xi: SqueezeParams, n: int, dim: int,
                                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """D(beta) (a^dag + kappa* a)^n S(xi)|0>, normalized."""
    work = 2 * dim + n
    vac = FockVector(squeezed_amplitudes(xi.kappa, work), normalized=False)
    v = apply_normal_ordered(normal_order_coeffs(n, xi.kappa.conjugate()), vac)
    v = apply_matrix(displacement_matrix(beta, v.dim), v)
    return _cut(v, dim, tolerances)
