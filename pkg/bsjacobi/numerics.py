#!/usr/bin/env python3
"""
numerics.py

Special functions and combinatorics shared by every other module.

Factorial ratios are handled in log space, the orthogonal polynomials by
recurrences (Hermite, Laguerre) or by the explicit finite sum that stays
a polynomial in all parameters (Jacobi).
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

ArrayLike = Union[float, complex, np.ndarray]


def log_factorial(n: int) -> float:
    """Return ln(n!).

    Args:
        n: Nonnegative integer

    Returns:
        float: ln(n!)
    """
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    return float(gammaln(n + 1))


@dataclass(frozen=True)
class LogFactorialTable:
    """Table of ln(n!) for n = 0..size-1."""
    values: np.ndarray

    @classmethod
    def build(cls, size: int) -> "LogFactorialTable":
        return cls(values=gammaln(np.arange(size, dtype=float) + 1.0))

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def binomial(n: int, k: int) -> float:
    """Exact integer binomial C(n, k) as float, zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0.0
    return float(math.comb(n, k))


def log_binomial(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def general_binomial(x: ArrayLike, k: int) -> ArrayLike:
    """Generalized binomial x(x-1)...(x-k+1)/k!.

    A polynomial in x, so negative integer x is allowed (C(-2, 1) = -2).
    """
    if k < 0:
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    out = np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0
    for i in range(k):
        out = out * (x - i) / (i + 1)
    return out


def scaled_power(z: complex, k: int, log_scale: ArrayLike = 0.0) -> ArrayLike:
    """Return z**k * exp(log_scale) without overflowing intermediates.

    z**0 is 1 even for z = 0.
    """
    if k == 0:
        return np.exp(log_scale) + 0j
    if z == 0:
        return np.zeros_like(np.asarray(log_scale, dtype=float)) + 0j
    return np.exp(log_scale + k * math.log(abs(z))) * np.exp(1j * k * np.angle(z))


def hermite(k: int, x: ArrayLike) -> ArrayLike:
    """Physicists' Hermite polynomial H_k(x) by three-term recurrence.

    Works for real or complex x, scalar or array.
    """
    if k < 0:
        raise ValueError(f"hermite needs k >= 0, got {k}")
    h_prev = np.ones_like(x) if np.ndim(x) else 1.0
    if k == 0:
        return h_prev
    h = 2.0 * x
    for j in range(1, k):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return h


def hermite_functions(kmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions pi^(-1/4) e^(-x^2/2) H_k(x)/sqrt(2^k k!).

    Rows k = 0..kmax. The normalization is folded into the recurrence so
    no factorial is ever formed.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((kmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def laguerre(n: int, alpha: float, x: ArrayLike) -> ArrayLike:
    """Associated Laguerre polynomial L_n^alpha(x) by recurrence in n.

    Valid for any real alpha (the recurrence is polynomial in alpha).
    """
    if n < 0:
        raise ValueError(f"laguerre needs n >= 0, got {n}")
    l_prev = np.ones_like(x) if np.ndim(x) else 1.0
    if n == 0:
        return l_prev
    l_cur = 1.0 + alpha - x
    for k in range(1, n):
        l_prev, l_cur = l_cur, ((2 * k + 1 + alpha - x) * l_cur - (k + alpha) * l_prev) / (k + 1)
    return l_cur


def laguerre_sequence(nmax: int, alpha: float, x: ArrayLike) -> list:
    """Return [L_0^alpha(x), ..., L_nmax^alpha(x)]."""
    seq = [np.ones_like(x) if np.ndim(x) else 1.0]
    if nmax >= 1:
        seq.append(1.0 + alpha - x)
    for k in range(1, nmax):
        seq.append(((2 * k + 1 + alpha - x) * seq[k] - (k + alpha) * seq[k - 1]) / (k + 1))
    return seq


def jacobi_poly(l: int, alpha: ArrayLike, beta: ArrayLike, z: ArrayLike) -> ArrayLike:
    """Jacobi polynomial P_l^(alpha, beta)(z).

    Explicit sum
        sum_s C(l+alpha, l-s) C(l+beta, s) ((z-1)/2)^s ((z+1)/2)^(l-s)
    with generalized binomials, finite for negative integer beta. alpha,
    beta and z may be arrays (broadcast together).
    """
    if l < 0:
        raise ValueError(f"jacobi_poly needs l >= 0, got {l}")
    zm = (np.asarray(z) - 1.0) / 2.0
    zp = (np.asarray(z) + 1.0) / 2.0
    total = 0.0
    for s in range(l + 1):
        total = total + (
            general_binomial(np.asarray(l + alpha, dtype=float), l - s)
            * general_binomial(np.asarray(l + beta, dtype=float), s)
            * zm ** s * zp ** (l - s)
        )
    return total


@dataclass(frozen=True)
class HermitePhysicists:
    def evaluate(self, k: int, x: ArrayLike) -> ArrayLike:
        return hermite(k, x)


@dataclass(frozen=True)
class AssociatedLaguerre:
    alpha: float

    def evaluate(self, k: int, x: ArrayLike) -> ArrayLike:
        return laguerre(k, self.alpha, x)


@dataclass(frozen=True)
class Jacobi:
    alpha: float
    beta: float

    def evaluate(self, k: int, x: ArrayLike) -> ArrayLike:
        return jacobi_poly(k, self.alpha, self.beta, x)


PolynomialKind = Union[HermitePhysicists, AssociatedLaguerre, Jacobi]
