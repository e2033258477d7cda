#!/usr/bin/env python3
"""
phasespace.py

Quadrature distributions, Husimi Q and Wigner W functions.

Generic evaluators take any FockVector (or density matrix); the closed
forms cover PSJP/PAJP states with coherent input. Convention:
x = (a + a^dag)/sqrt(2), alpha = (x + ip)/sqrt(2), vacuum variance 1/2.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .exceptions import GridError
from .fock import FockVector
from .jpstates import coherent_ket_coefficients, coherent_normalization
from .numerics import hermite, hermite_functions, laguerre, laguerre_sequence
from .protocols import GridExecutor
from .types import BeamSplitterParams, CoherentParams, ConditionalIndices, PhasePoint, QuadratureSpec

logger = logging.getLogger(__name__)

X_LIMIT = 40.0


def phase_grid(limit: float = 6.0, points: int = 121) -> Tuple[np.ndarray, np.ndarray]:
    """Default square grid; arrays are (x, p) axes."""
    axis = np.linspace(-limit, limit, points)
    return axis, axis.copy()


def _check_axis(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > X_LIMIT):
        raise GridError(f"|x| > {X_LIMIT} underflows the Hermite functions")
    return x


def quadrature_dist_numeric(v: FockVector, spec: QuadratureSpec) -> np.ndarray:
    """p(x, phi) = |sum_k c_k e^{-ik phi} h_k(x)|^2 with normalized Hermite functions h_k."""
    x = _check_axis(spec.grid)
    h = _hermite_rows(v.dim, x)
    phases = np.exp(-1j * spec.phi * np.arange(v.dim))
    amp = (v.amps * phases) @ h
    return np.abs(amp) ** 2


def _hermite_rows(dim: int, x: np.ndarray) -> np.ndarray:
    return hermite_functions(dim - 1, x)


def quadrature_grid_numeric(v: FockVector, xs: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """p(x, phi) on a (len(phis), len(xs)) grid."""
    h = _hermite_rows(v.dim, _check_axis(xs))
    k = np.arange(v.dim)
    phases = np.exp(-1j * np.outer(phis, k))
    return np.abs((phases * v.amps[None, :]) @ h) ** 2


def quadrature_dist_closed_coherent(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams,
                                    spec: QuadratureSpec) -> np.ndarray:
    """Closed form for the coherent-input PSJP/PAJP state.

    p = exp(-(x - sqrt2 |b'| cos(phi - phi_b'))^2)/(sqrt(pi) N')
        |sum_l d_l (e^{-i phi}/sqrt2)^l H_l(x - z)|^2,  z = b' e^{-i phi}/sqrt2
    """
    x = _check_axis(spec.grid)
    beta_p = bs.T * beta.beta
    norm_p = coherent_normalization(beta, idx, bs)
    d = coherent_ket_coefficients(beta_p, idx, bs)
    rot = np.exp(-1j * spec.phi) / math.sqrt(2.0)
    z = beta_p * rot
    acc = np.zeros_like(x, dtype=complex)
    for l, dl in d.items():
        acc += dl * rot ** l * hermite(l, x - z)
    shift = math.sqrt(2.0) * abs(beta_p) * math.cos(spec.phi - np.angle(beta_p))
    return np.exp(-(x - shift) ** 2) * np.abs(acc) ** 2 / (math.sqrt(math.pi) * norm_p)


def coherent_overlaps(alpha: np.ndarray, dim: int) -> np.ndarray:
    """<k|alpha> for k < dim, rows k, by the recurrence t_k = t_{k-1} alpha/sqrt(k)."""
    alpha = np.asarray(alpha, dtype=complex)
    out = np.empty((dim,) + alpha.shape, dtype=complex)
    out[0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for k in range(1, dim):
        out[k] = out[k - 1] * alpha / math.sqrt(k)
    return out


def husimi_numeric(v: FockVector, x, p) -> np.ndarray:
    """Q = |<alpha|psi>|^2/(2 pi) from Fock amplitudes; x and p broadcast."""
    alpha = (np.asarray(x) + 1j * np.asarray(p)) / math.sqrt(2.0)
    ket = coherent_overlaps(alpha, v.dim)
    amp = np.tensordot(v.amps, ket.conj(), axes=(0, 0))
    return np.abs(amp) ** 2 / (2.0 * math.pi)


def husimi_grid(v: FockVector, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    X, P = np.meshgrid(xs, ps, indexing="ij")
    return husimi_numeric(v, X, P)


def husimi_closed_coherent(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams,
                           pt: PhasePoint):
    """Compact Laguerre form of the Husimi function.

    Q = e^{-|alpha - b'|^2}/(2 pi N') |T|^{4n} (n!/(n+delta)!)^2
        |L_{n-mu}^{|nu|}(|R|^2 b' alpha*/|T|^2) f|^2
    with f = (-|R|^2 alpha*/|T|^2)^nu for nu > 0 and b'^{|nu|} otherwise.
    PhasePoint coordinates may be arrays.
    """
    beta_p = bs.T * beta.beta
    t2, r2 = bs.t2, bs.r2
    alpha = (np.asarray(pt.x) + 1j * np.asarray(pt.p)) / math.sqrt(2.0)
    ac = np.conj(alpha)
    lag = laguerre(idx.n - idx.mu, float(abs(idx.nu)), r2 * beta_p * ac / t2)
    if idx.nu > 0:
        f = (-r2 * ac / t2) ** idx.nu
    else:
        f = beta_p ** (-idx.nu) if idx.nu else 1.0
    pre = t2 ** idx.n * math.exp(math.lgamma(idx.n + 1) - math.lgamma(idx.n + idx.delta + 1))
    amp = pre * lag * f
    norm_p = coherent_normalization(beta, idx, bs)
    return np.exp(-np.abs(alpha - beta_p) ** 2) * np.abs(amp) ** 2 / (2.0 * math.pi * norm_p)


def wigner_from_density(rho: np.ndarray, x, p) -> np.ndarray:
    """W(x, p) = (1/pi) sum rho_mn (-1)^n sqrt(n!/m!) (2 alpha*)^{m-n} e^{-2|alpha|^2} L_n^{m-n}(4|alpha|^2).

    Prefactors are carried as log magnitudes; the m < n half enters as
    the complex conjugate.
    """
    X, P = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    dim = rho.shape[0]
    y = 2.0 * (X ** 2 + P ** 2)
    mod_u = np.sqrt(y)
    with np.errstate(divide="ignore"):
        log_u = np.log(mod_u)
    arg_u = -np.arctan2(P, X)
    W = np.zeros(X.shape)
    for d in range(dim):
        diag = np.array([rho[n + d, n] for n in range(dim - d)])
        if not np.any(diag):
            continue
        lag = laguerre_sequence(dim - 1 - d, float(d), y)
        power = np.exp(1j * d * arg_u)
        for n in range(dim - d):
            r = diag[n]
            if r == 0:
                continue
            log_pre = 0.5 * (gammaln(n + 1) - gammaln(n + d + 1)) - 0.5 * y
            if d:
                with np.errstate(invalid="ignore"):
                    mag = np.where(mod_u > 0, np.exp(log_pre + d * log_u), 0.0)
                W += 2.0 * (-1) ** n * np.real(r * mag * power) * lag[n]
            else:
                W += (-1) ** n * r.real * np.exp(log_pre) * lag[n]
    return W / math.pi


def density(v: FockVector) -> np.ndarray:
    return np.outer(v.amps, v.amps.conj())


def wigner_numeric(v: FockVector, pt: PhasePoint):
    """Wigner function of a pure state at a point (coordinates may be arrays)."""
    return wigner_from_density(density(v), pt.x, pt.p)


def wigner_grid(v: FockVector, xs: np.ndarray, ps: np.ndarray,
                executor: Optional[GridExecutor] = None) -> np.ndarray:
    """W on the (x, p) grid, indexed [ix, ip]."""
    return density_grid(density(v), xs, ps, executor)


def density_grid(rho: np.ndarray, xs: np.ndarray, ps: np.ndarray,
                 executor: Optional[GridExecutor] = None) -> np.ndarray:
    return evaluate_grid(lambda X, P: wigner_from_density(rho, X, P), xs, ps, executor)


def evaluate_grid(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], xs: np.ndarray, ps: np.ndarray,
                  executor: Optional[GridExecutor] = None, blocks: int = 8) -> np.ndarray:
    """Evaluate fn(X, P) on the grid, row blocks mapped over the executor."""
    X, P = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ps, dtype=float), indexing="ij")
    if executor is None:
        return fn(X, P)
    chunks = [c for c in np.array_split(np.arange(len(xs)), blocks) if len(c)]
    parts = list(executor.map(lambda rows: fn(X[rows], P[rows]), chunks))
    return np.concatenate(parts, axis=0)


def chi3(l: int, k: int, a):
    """Wigner kernel of (a^dag)^k |b><b| a^l in units of the coherent Gaussian."""
    a = np.asarray(a, dtype=complex)
    x = np.abs(a) ** 2
    if l >= k:
        return (-1) ** k * math.factorial(k) * a ** (l - k) * laguerre(k, float(l - k), x)
    return (-1) ** l * math.factorial(l) * np.conj(a) ** (k - l) * laguerre(l, float(k - l), x)


def wigner_closed_coherent(beta: CoherentParams, idx: ConditionalIndices, bs: BeamSplitterParams,
                           pt: PhasePoint):
    """Closed-form Wigner function of the coherent-input PSJP/PAJP state.

    W = e^{-|x+ip-sqrt2 b'|^2}/(pi N') sum_{l,l'} d_l d_l'^* chi3_{l',l}(u),
    u = sqrt2 (x + ip) - b'.
    """
    beta_p = bs.T * beta.beta
    d = coherent_ket_coefficients(beta_p, idx, bs)
    norm_p = coherent_normalization(beta, idx, bs)
    s = np.asarray(pt.x) + 1j * np.asarray(pt.p)
    u = math.sqrt(2.0) * s - beta_p
    total = np.zeros(np.shape(s), dtype=complex)
    for l, dl in d.items():
        for lp, dlp in d.items():
            total = total + dl * np.conj(dlp) * chi3(lp, l, u)
    gauss = np.exp(-np.abs(s - math.sqrt(2.0) * beta_p) ** 2)
    return gauss * total.real / (math.pi * norm_p)


def smooth_wigner_to_husimi(W: np.ndarray, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Convolve W with the vacuum Wigner function (1/pi) e^{-x^2-p^2}."""
    dx = xs[1] - xs[0]
    dp = ps[1] - ps[0]
    kx = np.exp(-np.subtract.outer(xs, xs) ** 2) / math.sqrt(math.pi) * dx
    kp = np.exp(-np.subtract.outer(ps, ps) ** 2) / math.sqrt(math.pi) * dp
    return kx @ W @ kp.T
