#!/usr/bin/env python3
"""
Tests for quadrature distributions, Husimi and Wigner functions.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from scipy.integrate import quad, trapezoid

from bsjacobi.exceptions import GridError
from bsjacobi.fock import FockVector, coherent_state, default_dim
from bsjacobi.jpstates import psjp_pajp_coherent
from bsjacobi.numerics import hermite_functions
from bsjacobi.phasespace import (
    chi3,
    husimi_closed_coherent,
    husimi_grid,
    husimi_numeric,
    phase_grid,
    quadrature_dist_closed_coherent,
    quadrature_dist_numeric,
    quadrature_grid_numeric,
    smooth_wigner_to_husimi,
    wigner_closed_coherent,
    wigner_grid,
    wigner_numeric,
)
from bsjacobi.types import CoherentParams, ConditionalIndices, PhasePoint, QuadratureSpec

EVENTS = [(2, 3), (3, 2), (0, 0), (1, 4)]


def _state(beta, idx, bs):
    dim = default_dim(abs(bs.T * beta.beta), idx.n, idx.m)
    return psjp_pajp_coherent(beta, idx, bs, dim).state


def test_vacuum_quadrature_peak():
    spec = QuadratureSpec(0.0, np.array([0.0]))
    assert quadrature_dist_numeric(FockVector.basis(0, 4), spec)[0] == pytest.approx(1 / math.sqrt(math.pi))


def test_quadrature_normalized(fig_beta, fig_bs):
    xs = np.linspace(-8, 8, 801)
    v = _state(fig_beta, ConditionalIndices(2, 3), fig_bs)
    for phi in (0.0, 1.1):
        assert trapezoid(quadrature_dist_numeric(v, QuadratureSpec(phi, xs)), xs) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n, m", EVENTS)
@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi / 2, 2.5])
def test_quadrature_closed_matches_numeric(fig_beta, fig_bs, n, m, phi):
    idx = ConditionalIndices(n, m)
    spec = QuadratureSpec(phi, np.linspace(-6, 6, 61))
    closed = quadrature_dist_closed_coherent(fig_beta, idx, fig_bs, spec)
    numeric = quadrature_dist_numeric(_state(fig_beta, idx, fig_bs), spec)
    np.testing.assert_allclose(closed, numeric, atol=1e-8)


def test_quadrature_grid_rows_are_phases(fig_beta, fig_bs):
    v = _state(fig_beta, ConditionalIndices(3, 2), fig_bs)
    xs, phis = np.linspace(-5, 5, 41), np.array([0.0, 0.4, 2.0])
    grid = quadrature_grid_numeric(v, xs, phis)
    assert grid.shape == (3, 41)
    np.testing.assert_allclose(grid[1], quadrature_dist_numeric(v, QuadratureSpec(0.4, xs)), atol=1e-12)


def test_quadrature_rejects_far_grid():
    with pytest.raises(GridError):
        quadrature_dist_numeric(FockVector.basis(0, 3), QuadratureSpec(0.0, np.array([0.0, 41.0])))


@pytest.mark.parametrize("n, m", EVENTS)
def test_husimi_closed_matches_numeric(fig_beta, fig_bs, n, m):
    idx = ConditionalIndices(n, m)
    xs, ps = phase_grid(6.0, 31)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    closed = husimi_closed_coherent(fig_beta, idx, fig_bs, PhasePoint(X, P))
    numeric = husimi_grid(_state(fig_beta, idx, fig_bs), xs, ps)
    np.testing.assert_allclose(closed, numeric, atol=1e-8)


def test_husimi_bounded(fig_beta, fig_bs):
    xs, ps = phase_grid(6.0, 61)
    Q = husimi_grid(_state(fig_beta, ConditionalIndices(2, 3), fig_bs), xs, ps)
    assert Q.min() >= 0.0
    assert Q.max() <= 1 / (2 * math.pi) + 1e-12


def test_coherent_husimi_peak():
    v = coherent_state(CoherentParams(1.0), 40)
    assert husimi_numeric(v, math.sqrt(2.0), 0.0) == pytest.approx(1 / (2 * math.pi))


def test_single_photon_wigner_origin():
    assert wigner_numeric(FockVector.basis(1, 2), PhasePoint(0.0, 0.0)) == pytest.approx(-1 / math.pi)


def test_vacuum_wigner_gaussian():
    x, p = 0.7, -0.4
    expected = math.exp(-(x * x + p * p)) / math.pi
    assert wigner_numeric(FockVector.basis(0, 1), PhasePoint(x, p)) == pytest.approx(expected)


@pytest.mark.parametrize("n, m", EVENTS)
def test_wigner_closed_matches_numeric(fig_beta, fig_bs, n, m):
    idx = ConditionalIndices(n, m)
    xs, ps = phase_grid(6.0, 31)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    closed = wigner_closed_coherent(fig_beta, idx, fig_bs, PhasePoint(X, P))
    numeric = wigner_grid(_state(fig_beta, idx, fig_bs), xs, ps)
    np.testing.assert_allclose(closed, numeric, atol=1e-8)


def test_wigner_integral_and_marginal(fig_beta, fig_bs):
    xs, ps = phase_grid(7.0, 141)
    v = _state(fig_beta, ConditionalIndices(2, 3), fig_bs)
    W = wigner_grid(v, xs, ps)
    assert trapezoid(trapezoid(W, ps, axis=1), xs) == pytest.approx(1.0, abs=1e-6)
    marginal = trapezoid(W, ps, axis=1)
    np.testing.assert_allclose(marginal, quadrature_dist_numeric(v, QuadratureSpec(0.0, xs)), atol=1e-6)


def test_wigner_negative_for_subtracted_state(fig_beta, fig_bs):
    xs, ps = phase_grid(6.0, 121)
    W = wigner_grid(_state(fig_beta, ConditionalIndices(2, 3), fig_bs), xs, ps)
    assert W.min() < 0.0


def test_nonclassicality_ordering(fig_beta, fig_bs):
    xs, ps = phase_grid(6.0, 61)
    subtracted = _state(fig_beta, ConditionalIndices(2, 3), fig_bs)
    added = _state(fig_beta, ConditionalIndices(3, 2), fig_bs)
    w_sub = wigner_grid(subtracted, xs, ps).min()
    w_add = wigner_grid(added, xs, ps).min()
    assert w_add < w_sub < 0.0
    q_sub = husimi_grid(subtracted, xs, ps).max()
    q_add = husimi_grid(added, xs, ps).max()
    assert q_sub > q_add
    assert w_sub == pytest.approx(-0.1866, abs=2e-3)
    assert w_add == pytest.approx(-0.2818, abs=2e-3)
    assert q_sub == pytest.approx(0.1249, abs=2e-3)
    assert q_add == pytest.approx(0.0782, abs=2e-3)


def test_executor_grid_matches_serial(fig_beta, fig_bs, serial_executor):
    xs, ps = phase_grid(5.0, 41)
    v = _state(fig_beta, ConditionalIndices(3, 2), fig_bs)
    serial = wigner_grid(v, xs, ps)
    np.testing.assert_allclose(wigner_grid(v, xs, ps, serial_executor), serial, atol=1e-14)
    with ThreadPoolExecutor(max_workers=3) as pool:
        np.testing.assert_allclose(wigner_grid(v, xs, ps, pool), serial, atol=1e-14)


def test_smoothing_gives_husimi(fig_beta, fig_bs):
    xs, ps = phase_grid(9.0, 181)
    v = _state(fig_beta, ConditionalIndices(3, 2), fig_bs)
    Q = smooth_wigner_to_husimi(wigner_grid(v, xs, ps), xs, ps)
    np.testing.assert_allclose(Q, husimi_grid(v, xs, ps), atol=1e-6)


@pytest.mark.parametrize("l, k", [(0, 0), (2, 1), (1, 3), (4, 4)])
def test_chi3_hermitian_pair(l, k):
    a = 0.8 - 0.6j
    assert chi3(l, k, a) == pytest.approx(np.conj(chi3(k, l, a)))


def test_phase_grid_axes():
    xs, ps = phase_grid()
    assert xs.shape == ps.shape == (121,)
    assert xs[0] == -6.0 and xs[-1] == 6.0


@pytest.mark.parametrize("x, p", [(0.0, 0.0), (0.8, -0.3), (-1.2, 1.5)])
def test_wigner_matches_direct_integral(x, p):
    # W = (1/pi) int psi*(x+y) psi(x-y) e^{2ipy} dy
    v = FockVector(np.array([0.6, 0.5j, 0.3 - 0.2j]), normalized=False).normalize()

    def psi(u):
        return complex(v.amps @ hermite_functions(v.dim - 1, np.array([u]))[:, 0])

    def integrand(y):
        return (np.conj(psi(x + y)) * psi(x - y) * np.exp(2j * p * y)).real

    direct = quad(integrand, -np.inf, np.inf)[0] / math.pi
    assert wigner_numeric(v, PhasePoint(x, p)) == pytest.approx(direct, abs=1e-9)
