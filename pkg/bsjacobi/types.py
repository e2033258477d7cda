#!/usr/bin/env python3
"""
types.py

Data types and dataclasses for the bsjacobi engine.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional

import numpy as np

from .exceptions import ParameterError

if TYPE_CHECKING:
    from .fock import FockVector


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared across the engine.

    Attributes:
        tail_mass: Largest acceptable probability beyond the truncation edge
        leakage: Largest acceptable norm loss of the two-mode transform
        unreachable: Raw probability below which an outcome is unreachable
        series_cut: Relative size at which infinite series are cut
    """
    tail_mass: float = 1e-12
    leakage: float = 1e-10
    unreachable: float = 1e-300
    series_cut: float = 1e-16


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class BeamSplitterParams:
    """Lossless beam splitter, T = cos(theta) e^{i phiT}, R = sin(theta) e^{i phiR}.

    Attributes:
        theta: Mixing angle in radians
        phiT: Transmittance phase
        phiR: Reflectance phase
    """
    theta: float
    phiT: float = 0.0
    phiR: float = 0.0

    @classmethod
    def from_transmissivity(cls, t2: float, phiT: float = 0.0, phiR: float = 0.0) -> "BeamSplitterParams":
        if not 0.0 <= t2 <= 1.0:
            raise ParameterError(f"|T|^2 must lie in [0, 1], got {t2}")
        return cls(theta=math.acos(math.sqrt(t2)), phiT=phiT, phiR=phiR)

    @property
    def T(self) -> complex:
        return math.cos(self.theta) * cmath.exp(1j * self.phiT)

    @property
    def R(self) -> complex:
        return math.sin(self.theta) * cmath.exp(1j * self.phiR)

    @property
    def t2(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def r2(self) -> float:
        return math.sin(self.theta) ** 2


@dataclass(frozen=True)
class CoherentParams:
    """Coherent amplitude beta."""
    beta: complex

    def attenuated(self, T: complex) -> "CoherentParams":
        return CoherentParams(beta=T * self.beta)


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze parameter xi with kappa = -e^{i phi_xi} tanh|xi|."""
    xi: complex

    @classmethod
    def from_kappa(cls, kappa: complex) -> "SqueezeParams":
        if abs(kappa) >= 1.0:
            raise ParameterError(f"|kappa| must be < 1, got {abs(kappa)}")
        if kappa == 0:
            return cls(xi=0j)
        return cls(xi=math.atanh(abs(kappa)) * (-kappa / abs(kappa)))

    @property
    def r(self) -> float:
        return abs(self.xi)

    @property
    def kappa(self) -> complex:
        return -cmath.exp(1j * cmath.phase(self.xi)) * math.tanh(abs(self.xi))

    def doubled(self) -> "SqueezeParams":
        return SqueezeParams(xi=2.0 * self.xi)

    def attenuated(self, T: complex) -> "SqueezeParams":
        return SqueezeParams.from_kappa(T * T * self.kappa)


@dataclass(frozen=True)
class ConditionalIndices:
    """Input Fock photons n and detected photons m.

    nu < 0 is the photon-subtracted regime, nu > 0 the photon-added one.
    """
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ParameterError(f"n and m must be >= 0, got n={self.n}, m={self.m}")

    @property
    def nu(self) -> int:
        return self.n - self.m

    @property
    def mu(self) -> int:
        return max(0, self.nu)

    @property
    def delta(self) -> int:
        return self.mu - self.nu

    @property
    def label(self) -> str:
        if self.nu < 0:
            return "PSJP"
        if self.nu > 0:
            return "PAJP"
        return "JP"


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float

    @property
    def alpha(self) -> complex:
        return complex(self.x, self.p) / math.sqrt(2.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Local-oscillator phase and the x grid of a quadrature distribution."""
    phi: float
    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or (len(g) > 1 and np.any(np.diff(g) <= 0)):
            raise ParameterError("quadrature grid must be a strictly increasing 1-d array")
        object.__setattr__(self, "grid", g)


@dataclass(frozen=True)
class DetectorModel:
    """Photon-chopping detector with N on/off diodes and efficiency eta."""
    N: int
    eta: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError(f"detector needs N >= 1, got {self.N}")
        if not 0.0 < self.eta <= 1.0:
            raise ParameterError(f"detector efficiency must lie in (0, 1], got {self.eta}")


@dataclass
class ConditionalOutcome:
    """Normalized conditional state with its event probability P(n, m)."""
    state: "FockVector"
    probability: float
    n: int
    m: int
    norm: Optional[float] = None

    @property
    def nu(self) -> int:
        return self.n - self.m


@dataclass
class CatComponents:
    """The two cat-like components of a squeezed-input PSJP/PAJP state.

    Attributes:
        plus: Normalized component built with +sqrt(kappa'/2)
        minus: Normalized component built with -sqrt(kappa'/2)
        degenerate: True when kappa' = 0 and both collapse to one Fock state
    """
    plus: "FockVector"
    minus: "FockVector"
    degenerate: bool = False


@dataclass
class PhotonStats:
    """Photon-number distribution and its low moments."""
    distribution: np.ndarray
    mean: float
    second_moment: float
    mandel_q: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "distribution": [float(v) for v in self.distribution],
            "mean": self.mean,
            "second_moment": self.second_moment,
            "variance": self.variance,
            "mandel_q": self.mandel_q,
        }


@dataclass
class FockMixture:
    """Weights p_n of a diagonal photon-number mixture, n = 0..len-1."""
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError("mixture weights must be nonnegative and sum to 1")
        self.weights = w

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.weights)), self.weights))

    @property
    def variance(self) -> float:
        n = np.arange(len(self.weights))
        return float(np.dot(n * n, self.weights)) - self.mean ** 2


@dataclass
class EnsembleMember:
    weight: float
    state: "FockVector"
    n: int
    m: int


@dataclass
class ConditionalEnsemble:
    """Convex mixture of conditional pure states."""
    members: List[EnsembleMember] = field(default_factory=list)
    total_probability: float = 0.0

    @property
    def total_weight(self) -> float:
        return float(sum(mb.weight for mb in self.members))


@dataclass
class CheckResult:
    """Outcome of a single verification check."""
    name: str
    deviation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
