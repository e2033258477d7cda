#!/usr/bin/env python3
"""
fock.py

Truncated Fock-space state algebra: single-mode vectors, ladder operators,
input-state constructors and the displacement and squeeze kernels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .exceptions import ParameterError, TruncationError, UnreachableOutcomeError
from .numerics import laguerre_sequence, scaled_power
from .types import DEFAULT_TOLERANCES, CoherentParams, SqueezeParams, Tolerances

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over |0>, ..., |dim-1>.

    Attributes:
        amps: Amplitude array, length dim
        normalized: False for intermediate (unnormalized) vectors
    """
    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def basis(cls, k: int, dim: int) -> "FockVector":
        if not 0 <= k < dim:
            raise TruncationError(f"Fock state |{k}> does not fit in dim={dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return len(self.amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.amps)

    @property
    def tail_mass(self) -> float:
        return float(abs(self.amps[-1]) ** 2)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def normalize(self) -> "FockVector":
        norm2 = self.norm_squared
        if norm2 <= DEFAULT_TOLERANCES.unreachable or self.is_zero:
            raise UnreachableOutcomeError("cannot normalize a zero vector")
        return FockVector(self.amps / math.sqrt(norm2), normalized=True)

    def resized(self, dim: int) -> "FockVector":
        """Zero-pad or cut to dim (cutting discards amplitudes)."""
        amps = np.zeros(dim, dtype=complex)
        keep = min(dim, self.dim)
        amps[:keep] = self.amps[:keep]
        return FockVector(amps, normalized=self.normalized and keep == self.dim)

    def overlap(self, other: "FockVector") -> complex:
        dim = max(self.dim, other.dim)
        return complex(np.vdot(self.resized(dim).amps, other.resized(dim).amps))

    def fidelity(self, other: "FockVector") -> float:
        """|<a|b>|^2 / (<a|a><b|b>), zero-padding to a common dim."""
        denom = self.norm_squared * other.norm_squared
        if denom == 0.0:
            return 0.0
        return abs(self.overlap(other)) ** 2 / denom

    def mean_photon_number(self) -> float:
        p = self.probabilities
        return float(np.dot(np.arange(self.dim), p) / p.sum())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FockVector":
        amps = np.array([complex(re, im) for re, im in data["amps"]])
        if len(amps) != data.get("dim", len(amps)):
            raise ParameterError("FockVector dim does not match amplitude count")
        return cls(amps, normalized=bool(data.get("normalized", True)))


def coherent_amplitudes(beta: complex, dim: int) -> np.ndarray:
    """Raw e^{-|b|^2/2} b^k/sqrt(k!) for k < dim."""
    out = np.empty(dim, dtype=complex)
    log_pre = -0.5 * abs(beta) ** 2
    for k in range(dim):
        out[k] = scaled_power(beta, k, log_pre - 0.5 * math.lgamma(k + 1))
    return out


def coherent_state(p: CoherentParams, dim: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """Truncated coherent state |beta>, renormalized over the truncation.

    Raises:
        TruncationError: If the Poisson tail beyond dim exceeds the threshold
    """
    if dim < 1:
        raise ParameterError(f"dim must be >= 1, got {dim}")
    tail = float(poisson.sf(dim - 1, abs(p.beta) ** 2)) if p.beta != 0 else 0.0
    if tail > tolerances.tail_mass:
        raise TruncationError(f"coherent |beta|={abs(p.beta):.4g} needs more than dim={dim} (tail {tail:.3e})")
    logger.debug(f"coherent state beta={p.beta} dim={dim} tail={tail:.3e}")
    return FockVector(coherent_amplitudes(p.beta, dim)).normalize()


def squeezed_amplitudes(kappa: complex, dim: int) -> np.ndarray:
    """Raw (1-|k|^2)^{1/4} sqrt((2j)!)/(2^j j!) k^j on |2j>."""
    out = np.zeros(dim, dtype=complex)
    log_pre = 0.25 * math.log1p(-abs(kappa) ** 2)
    for j in range((dim + 1) // 2):
        log_c = log_pre + 0.5 * math.lgamma(2 * j + 1) - j * math.log(2.0) - math.lgamma(j + 1)
        out[2 * j] = scaled_power(kappa, j, log_c)
    return out


def squeezed_vacuum(p: SqueezeParams, dim: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """Truncated squeezed vacuum S(xi)|0>; odd amplitudes are exactly zero.

    Raises:
        TruncationError: If the even tail beyond dim exceeds the threshold
    """
    if dim < 2:
        raise ParameterError(f"dim must be >= 2, got {dim}")
    amps = squeezed_amplitudes(p.kappa, dim)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if tail > tolerances.tail_mass:
        raise TruncationError(f"squeezed |xi|={p.r:.4g} needs more than dim={dim} (tail {tail:.3e})")
    return FockVector(amps).normalize()


def apply_creation(v: FockVector, times: int = 1, dim: Optional[int] = None,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> FockVector:
    """Unnormalized (a^dagger)^times v.

    The result has dim v.dim + times unless dim is given; a smaller dim
    that drops more than the leakage threshold of weight is an error.
    """
    if times < 0:
        raise ParameterError(f"times must be >= 0, got {times}")
    full = v.dim + times
    amps = np.zeros(full, dtype=complex)
    k = np.arange(v.dim)
    factor = np.exp(0.5 * (gammaln(k + times + 1.0) - gammaln(k + 1.0)))
    amps[times:] = factor * v.amps
    out = FockVector(amps, normalized=False)
    if dim is None or dim >= full:
        return out.resized(dim) if dim else out
    dropped = float(np.sum(np.abs(amps[dim:]) ** 2))
    if dropped > tolerances.leakage * max(out.norm_squared, 1e-300):
        raise TruncationError(f"creation pushed weight {dropped:.3e} past dim={dim}")
    return FockVector(amps[:dim], normalized=False)


def apply_annihilation(v: FockVector, times: int = 1) -> FockVector:
    """Unnormalized a^times v; the zero vector signals a killed support."""
    if times < 0:
        raise ParameterError(f"times must be >= 0, got {times}")
    amps = np.zeros(v.dim, dtype=complex)
    if times < v.dim:
        k = np.arange(v.dim - times)
        factor = np.exp(0.5 * (gammaln(k + times + 1.0) - gammaln(k + 1.0)))
        amps[: v.dim - times] = factor * v.amps[times:]
    out = FockVector(amps, normalized=False)
    if out.is_zero:
        logger.debug(f"annihilation^{times} removed the whole support")
    return out


def attenuate(v: FockVector, T: complex, normalize: bool = True) -> FockVector:
    """T^n v; normalized unless asked otherwise."""
    if abs(T) > 1.0 + 1e-15:
        raise ParameterError(f"|T| must be <= 1, got {abs(T)}")
    powers = np.array([T ** k if k else 1.0 + 0j for k in range(v.dim)])
    out = FockVector(v.amps * powers, normalized=False)
    return out.normalize() if normalize else out


def apply_matrix(matrix: np.ndarray, v: FockVector) -> FockVector:
    return FockVector(matrix @ v.resized(matrix.shape[1]).amps, normalized=False)


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Truncated D(alpha) from the Laguerre kernel.

    <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2), m >= n,
    and with -alpha* for m < n.
    """
    x = abs(alpha) ** 2
    D = np.zeros((dim, dim), dtype=complex)
    for d in range(dim):
        lag = laguerre_sequence(dim - 1 - d, float(d), x)
        for n in range(dim - d):
            m = n + d
            log_pre = 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1)) - 0.5 * x
            D[m, n] = scaled_power(alpha, d, log_pre) * lag[n]
            if d:
                D[n, m] = scaled_power(-alpha.conjugate(), d, log_pre) * lag[n]
    return D


def squeeze_matrix(p: SqueezeParams, dim: int, pad: Optional[int] = None) -> np.ndarray:
    """Truncated S(xi), columns S|n> from S|n+1> = cosh r/sqrt(n+1) (a^dag - kappa* a) S|n>.

    Columns are generated in a padded basis and then cut to dim.
    """
    work = dim + (dim if pad is None else pad)
    kappa = p.kappa
    cosh_r = math.cosh(p.r)
    cols = np.zeros((work, dim), dtype=complex)
    cols[:, 0] = squeezed_amplitudes(kappa, work)
    sq = np.sqrt(np.arange(1, work, dtype=float))
    for n in range(dim - 1):
        col = cols[:, n]
        nxt = np.zeros(work, dtype=complex)
        nxt[1:] += sq * col[:-1]
        nxt[:-1] -= kappa.conjugate() * sq * col[1:]
        cols[:, n + 1] = cosh_r / math.sqrt(n + 1) * nxt
    return cols[:dim, :]


def unitarity_defect(matrix: np.ndarray, used: int) -> float:
    """max |M^dag M - 1| on the first `used` columns."""
    block = matrix[:, :used]
    return float(np.max(np.abs(block.conj().T @ block - np.eye(used))))


def displaced_fock(beta: complex, n: int, dim: int) -> FockVector:
    """D(beta)|n> from the displacement kernel."""
    if n >= dim:
        raise TruncationError(f"|{n}> does not fit in dim={dim}")
    return FockVector(displacement_matrix(beta, dim)[:, n], normalized=False).normalize()


def default_dim(beta_abs: float, n: int = 0, m: int = 0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Smallest dim with Poisson tail below threshold and dim >= |b|^2 + 10|b| + n + m + 10."""
    dim = int(math.ceil(beta_abs ** 2 + 10.0 * beta_abs)) + n + m + 10
    while beta_abs and poisson.sf(dim - 1, beta_abs ** 2) > tolerances.tail_mass:
        dim += 1
    return dim


def default_dim_squeezed(p: SqueezeParams, n: int = 0, m: int = 0,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Smallest even-padded dim whose squeezed-vacuum tail is below tail_mass^2.

    The squared threshold leaves room for the polynomial growth that the
    ladder operators of a conditional state put on the tail.
    """
    probe = np.abs(squeezed_amplitudes(p.kappa, 2000)) ** 2
    tail = np.cumsum(probe[::-1])[::-1]
    dim = n + m + 20
    while dim < len(tail) and tail[dim] > tolerances.tail_mass ** 2:
        dim += 2
    return dim + n + m
