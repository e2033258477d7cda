#!/usr/bin/env python3
"""
beamsplitter.py

Brute-force two-mode oracle: the lossless beam-splitter transform in a
truncated product basis, projection of mode 2 onto a photon count, and
the event probability P(n, m) for an arbitrary single-mode input.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .exceptions import ParameterError, TruncationError, UnreachableOutcomeError
from .fock import FockVector
from .types import (
    DEFAULT_TOLERANCES,
    BeamSplitterParams,
    ConditionalEnsemble,
    ConditionalIndices,
    ConditionalOutcome,
    EnsembleMember,
    Tolerances,
)

logger = logging.getLogger(__name__)

EXPM_MAX_DIM = 20
# Below this |T|^2 the T^{-n2} factor amplifies rounding; blocks are used instead.
FACTORED_MIN_T2 = 0.1


@dataclass(frozen=True)
class TwoModeState:
    """Amplitudes amps[k1, k2] over a truncated product basis.

    Attributes:
        amps: Complex matrix of shape (d1, d2)
        leakage: Norm lost by the last transform (0 for prepared inputs)
    """
    amps: np.ndarray
    leakage: float = 0.0

    @classmethod
    def product(cls, mode1: FockVector, mode2: FockVector,
                dims: Optional[Tuple[int, int]] = None) -> "TwoModeState":
        d1, d2 = dims or (mode1.dim, mode2.dim)
        return cls(np.outer(mode1.resized(d1).amps, mode2.resized(d2).amps))

    @property
    def dims(self) -> Tuple[int, int]:
        return self.amps.shape

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def mean_total_photons(self) -> float:
        d1, d2 = self.dims
        total = np.add.outer(np.arange(d1), np.arange(d2))
        return float(np.sum(total * np.abs(self.amps) ** 2) / self.norm_squared)

    def marginal(self, mode: int) -> np.ndarray:
        """Photon-number distribution of mode 1 or 2."""
        probs = np.abs(self.amps) ** 2
        return probs.sum(axis=1 if mode == 1 else 0)


def _exp_hop(A: np.ndarray, c: complex, into_mode1: bool) -> np.ndarray:
    """Apply exp(c a1^dag a2) (into_mode1) or exp(c a2^dag a1) to A.

    Each power is a shifted diagonal; whatever would land past the basis
    edge is dropped and shows up as leakage.
    """
    d1, d2 = A.shape
    out = A.copy()
    if c == 0:
        return out
    k1 = np.arange(d1, dtype=float)
    k2 = np.arange(d2, dtype=float)
    for j in range(1, min(d1, d2)):
        if into_mode1:
            src_1, src_2 = k1[: d1 - j], k2[j:]
            log_c = (0.5 * (gammaln(src_1 + j + 1) - gammaln(src_1 + 1))[:, None]
                     + 0.5 * (gammaln(src_2 + 1) - gammaln(src_2 - j + 1))[None, :])
            out[j:, : d2 - j] += c ** j * np.exp(log_c - gammaln(j + 1)) * A[: d1 - j, j:]
        else:
            src_1, src_2 = k1[j:], k2[: d2 - j]
            log_c = (0.5 * (gammaln(src_1 + 1) - gammaln(src_1 - j + 1))[:, None]
                     + 0.5 * (gammaln(src_2 + j + 1) - gammaln(src_2 + 1))[None, :])
            out[: d1 - j, j:] += c ** j * np.exp(log_c - gammaln(j + 1)) * A[j:, : d2 - j]
    return out


def transform_two_mode(state: TwoModeState, bs: BeamSplitterParams,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> TwoModeState:
    """Apply V^dag = T^{n1} exp(-R* a2^dag a1) exp(R a1^dag a2) T^{-n2}.

    For |T|^2 below FACTORED_MIN_T2 the transform is taken block by block
    instead (see transform_two_mode_blocks).

    Raises:
        TruncationError: If the norm lost at the basis edge exceeds the threshold
    """
    if bs.t2 < FACTORED_MIN_T2:
        return transform_two_mode_blocks(state, bs, tolerances)
    T, R = bs.T, bs.R
    d1, d2 = state.dims
    norm_in = state.norm_squared
    A = state.amps * (T ** -np.arange(d2, dtype=float))[None, :]
    A = _exp_hop(A, R, into_mode1=True)
    A = _exp_hop(A, -R.conjugate(), into_mode1=False)
    A = A * (T ** np.arange(d1, dtype=float))[:, None]
    leakage = abs(norm_in - float(np.sum(np.abs(A) ** 2))) / norm_in
    if leakage > tolerances.leakage:
        raise TruncationError(f"beam-splitter leakage {leakage:.3e} at dims {d1}x{d2}")
    logger.debug(f"two-mode transform dims={d1}x{d2} leakage={leakage:.3e}")
    return TwoModeState(A, leakage=leakage)


def transform_two_mode_blocks(state: TwoModeState, bs: BeamSplitterParams,
                              tolerances: Tolerances = DEFAULT_TOLERANCES) -> TwoModeState:
    """Same transform, one total-photon-number block at a time.

    The block of N = n1 + n2 holds |k, N-k> for k = 0..N and is closed under
    the generators, so expm on it is exact; only outputs past the basis
    edge are lost.

    Raises:
        TruncationError: If the norm lost at the basis edge exceeds the threshold
    """
    d1, d2 = state.dims
    norm_in = state.norm_squared
    out = np.zeros((d1, d2), dtype=complex)
    for total in range(d1 + d2 - 1):
        src = np.arange(max(0, total - d2 + 1), min(total, d1 - 1) + 1)
        vec_in = state.amps[src, total - src]
        if not np.any(vec_in):
            continue
        k = np.arange(total + 1)
        off = np.sqrt((k[:-1] + 1.0) * (total - k[:-1]))
        gen = bs.theta * (np.diag(off, k=-1) - np.diag(off, k=1))
        l3 = k - total / 2.0
        block = (np.exp(1j * (bs.phiT + bs.phiR) * l3)[:, None] * expm(gen)
                 * np.exp(1j * (bs.phiT - bs.phiR) * l3)[None, :])
        vec_out = block[:, src] @ vec_in
        keep = (k < d1) & (total - k < d2)
        out[k[keep], total - k[keep]] = vec_out[keep]
    leakage = abs(norm_in - float(np.sum(np.abs(out) ** 2))) / norm_in
    if leakage > tolerances.leakage:
        raise TruncationError(f"beam-splitter leakage {leakage:.3e} at dims {d1}x{d2}")
    logger.debug(f"blockwise two-mode transform dims={d1}x{d2} leakage={leakage:.3e}")
    return TwoModeState(out, leakage=leakage)


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def transform_two_mode_expm(state: TwoModeState, bs: BeamSplitterParams) -> TwoModeState:
    """Same transform through expm of the SU(2) generators.

    V^dag = e^{i(phiT+phiR)L3} e^{2i theta L2} e^{i(phiT-phiR)L3}, with
    2i theta L2 = theta (a1^dag a2 - a2^dag a1) and L3 = (n1 - n2)/2.
    """
    d1, d2 = state.dims
    if d1 > EXPM_MAX_DIM or d2 > EXPM_MAX_DIM:
        raise ParameterError(f"expm cross-check limited to dims <= {EXPM_MAX_DIM}")
    a1 = np.kron(_ladder(d1), np.eye(d2))
    a2 = np.kron(np.eye(d1), _ladder(d2))
    l3 = np.diag(np.add.outer(np.arange(d1), -np.arange(d2)).ravel() / 2.0)
    phase_in = np.diag(np.exp(1j * (bs.phiT - bs.phiR) * np.diag(l3)))
    phase_out = np.diag(np.exp(1j * (bs.phiT + bs.phiR) * np.diag(l3)))
    mix = expm(bs.theta * (a1.T @ a2 - a2.T @ a1))
    vec = phase_out @ mix @ phase_in @ state.amps.ravel()
    return TwoModeState(vec.reshape(d1, d2))


def condition_on_count(out: TwoModeState, m: int, n: int = 0,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Project mode 2 onto |m> and normalize mode 1.

    Raises:
        UnreachableOutcomeError: If the outcome probability is below threshold
    """
    d1, d2 = out.dims
    if not 0 <= m < d2:
        raise TruncationError(f"count m={m} outside mode-2 dim {d2}")
    column = FockVector(out.amps[:, m], normalized=False)
    probability = column.norm_squared
    if probability < tolerances.unreachable:
        raise UnreachableOutcomeError(f"outcome (n={n}, m={m}) is unreachable")
    return ConditionalOutcome(state=column.normalize(), probability=probability, n=n, m=m)


def _oracle_output(input_state: FockVector, n: int, bs: BeamSplitterParams, min_d2: int = 0,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> TwoModeState:
    # Photon number is conserved, so dim + n per mode holds every reachable state.
    d = input_state.dim + n
    dims = (d, max(d, min_d2))
    two = TwoModeState.product(input_state, FockVector.basis(n, n + 1), dims=dims)
    return transform_two_mode(two, bs, tolerances)


def oracle_conditional(input_state: FockVector, idx: ConditionalIndices, bs: BeamSplitterParams,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalOutcome:
    """Conditional state of mode 1 for input |Phi> x |n>, m counts in mode 2."""
    out = _oracle_output(input_state, idx.n, bs, idx.m + 1, tolerances)
    return condition_on_count(out, idx.m, idx.n, tolerances)


def probability_map(input_state: FockVector, n: int, bs: BeamSplitterParams, m_max: int,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """P(n, m) for m = 0..m_max from the two-mode oracle."""
    out = _oracle_output(input_state, n, bs, m_max + 1, tolerances)
    return np.sum(np.abs(out.amps[:, : m_max + 1]) ** 2, axis=0)


def probability_closed_generic(diag: np.ndarray, idx: ConditionalIndices, bs: BeamSplitterParams) -> float:
    """Direct evaluation of P(n, m) from the input number distribution <q|rho|q>.

    P = |R|^{-2nu} n!/(|T|^{2m} m!) sum_{j,k=mu}^{n} (-|R|^2)^{j+k} C(m, j-nu) C(m, k-nu)
        sum_{q>=delta} q! |T|^{2q}/(q+nu)! C(q+j, j) C(q+k, k) <q|rho|q>
    """
    n, m, nu, mu, delta = idx.n, idx.m, idx.nu, idx.mu, idx.delta
    t2, r2 = bs.t2, bs.r2
    if t2 <= 0.0:
        raise ParameterError("closed-form probability needs |T| > 0")
    diag = np.asarray(diag, dtype=float)
    q = np.arange(delta, len(diag), dtype=float)
    if len(q) == 0:
        return 0.0
    weights = diag[delta:]
    log_base = gammaln(q + 1) - gammaln(q + nu + 1) + (q - m) * math.log(t2)
    total = 0.0
    for j in range(mu, n + 1):
        for k in range(mu, n + 1):
            log_cc = (gammaln(q + j + 1) - gammaln(q + 1) - gammaln(j + 1)
                      + gammaln(q + k + 1) - gammaln(q + 1) - gammaln(k + 1))
            inner = float(np.sum(np.exp(log_base + log_cc) * weights))
            coeff = (-1) ** (j + k) * r2 ** (j + k - nu) * math.comb(m, j - nu) * math.comb(m, k - nu)
            total += coeff * inner
    return math.exp(math.lgamma(n + 1) - math.lgamma(m + 1)) * total


def conditional_from_mixture(members: Sequence[Tuple[float, FockVector]], idx: ConditionalIndices,
                             bs: BeamSplitterParams,
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionalEnsemble:
    """Condition a convex mixture of pure inputs; unreachable members drop out."""
    ensemble = ConditionalEnsemble()
    for weight, state in members:
        if weight <= 0:
            continue
        try:
            outcome = oracle_conditional(state, idx, bs, tolerances)
        except UnreachableOutcomeError:
            continue
        ensemble.members.append(EnsembleMember(weight * outcome.probability, outcome.state, idx.n, idx.m))
    total = ensemble.total_weight
    if total < tolerances.unreachable:
        raise UnreachableOutcomeError(f"outcome (n={idx.n}, m={idx.m}) unreachable for every member")
    for member in ensemble.members:
        member.weight /= total
    ensemble.total_probability = total
    return ensemble
