#!/usr/bin/env python3
"""
engine.py

StateEngine: facade over the state-preparation modules that owns logging,
tolerances, the grid executor and the figure presets.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import detection
from .beamsplitter import probability_map
from .exceptions import CatalogNotLoadedError, ParameterError
from .formatters import grid_rows
from .fock import FockVector, coherent_state, default_dim, default_dim_squeezed, squeezed_vacuum
from .jpstates import jp_state_general, psjp_pajp_coherent, psjp_pajp_squeezed
from .numerics import hermite_functions
from .phasespace import evaluate_grid, husimi_numeric, phase_grid, quadrature_grid_numeric, wigner_grid
from .protocols import GridExecutor
from .statistics import photon_stats_closed, photon_stats_numeric, probability_closed_coherent
from .types import (
    DEFAULT_TOLERANCES,
    BeamSplitterParams,
    CoherentParams,
    ConditionalEnsemble,
    ConditionalIndices,
    ConditionalOutcome,
    DetectorModel,
    PhotonStats,
    SqueezeParams,
    SuiteReport,
    Tolerances,
)
from .verification import SUITES, run_suite

# Try rapidfuzz for "did you mean" suggestions
try:
    from rapidfuzz import fuzz, process
    FUZZY_AVAILABLE = True
except ImportError:
    FUZZY_AVAILABLE = False

DEFAULT_FIGURES = Path(__file__).resolve().parent.parent / "figures.json"
INPUT_KINDS = ("coherent", "squeezed", "fock")


class StateEngine:
    """Entry point for conditional state preparation and its observables.

    Attributes:
        figures_path: Location of the figure preset catalog
        tolerances: Numerical thresholds passed to every module
        executor: Executor used for grid and sweep evaluation
        logger: Logger instance
    """

    def __init__(
        self,
        figures_path: Optional[Path] = None,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
        workers: int = 4,
        executor: Optional[GridExecutor] = None,
        logger: Optional[logging.Logger] = None,
    ):
        """Initialize the StateEngine.

        Args:
            figures_path: Figure preset JSON (defaults to figures.json at the repo root)
            tolerances: Numerical thresholds
            workers: Thread count of the default executor
            executor: Custom executor (for testing)
            logger: Custom logger instance
        """
        self.figures_path = Path(figures_path) if figures_path else DEFAULT_FIGURES
        self.tolerances = tolerances
        if workers < 1:
            raise ParameterError(f"workers must be >= 1, got {workers}")

        # Allow injecting a custom executor for testing
        self._own_executor = executor is None
        self.executor = executor or ThreadPoolExecutor(max_workers=workers)

        # Logger
        self.logger = logger or logging.getLogger(__name__)
        if not self.logger.handlers:
            h = logging.StreamHandler()
            h.setFormatter(logging.Formatter("%(levelname)s:%(message)s"))
            self.logger.addHandler(h)
        self.logger.setLevel(logging.INFO)

        self._figures: Dict[str, Mapping[str, Any]] = {}
        self._loaded = False

        if not FUZZY_AVAILABLE:
            self.logger.warning("No fuzzy library available; name suggestions disabled.")

    def close(self) -> None:
        if self._own_executor:
            self.executor.shutdown(wait=True)

    def __enter__(self) -> "StateEngine":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # Figure presets

    def load_figures(self) -> None:
        """Read the figure preset catalog and index it by id.

        Raises:
            ParameterError: If the catalog is missing or malformed
        """
        try:
            with open(self.figures_path) as f:
                raw = json.load(f)
        except FileNotFoundError as e:
            raise ParameterError(f"Figure catalog not found: {self.figures_path}") from e
        except json.JSONDecodeError as e:
            raise ParameterError(f"Invalid JSON in {self.figures_path}: {e}") from e
        try:
            self._figures = {str(entry["id"]): MappingProxyType(dict(entry)) for entry in raw}
        except (KeyError, TypeError) as e:
            raise ParameterError(f"Figure catalog entries need an 'id': {e}") from e
        self._loaded = True
        self.logger.info(f"Loaded {len(self._figures)} figure presets.")

    def _ensure_loaded(self):
        """Raises CatalogNotLoadedError unless load_figures() has run."""
        if not self._loaded:
            raise CatalogNotLoadedError("Call load_figures() before requesting figures.")

    @property
    def figure_ids(self) -> List[str]:
        self._ensure_loaded()
        return list(self._figures)

    def suggest(self, query: str, choices: Sequence[str], limit: int = 3) -> List[str]:
        """Closest names to query, best first (empty without rapidfuzz)."""
        if not FUZZY_AVAILABLE or not choices:
            return []
        matches = process.extract(query, list(choices), scorer=fuzz.ratio, limit=limit)
        return [name for name, score, _ in matches if score >= 40]

    def figure(self, fig_id: str) -> Mapping[str, Any]:
        """Read-only preset parameters of a figure.

        Raises:
            CatalogNotLoadedError: If load_figures() hasn't been called yet
            ParameterError: If the figure id is unknown
        """
        self._ensure_loaded()
        try:
            return self._figures[fig_id]
        except KeyError:
            hint = self.suggest(fig_id, list(self._figures))
            extra = f"; did you mean {', '.join(hint)}?" if hint else ""
            raise ParameterError(f"unknown figure {fig_id!r}{extra}") from None

    # States

    def build_input(self, kind: str, value: complex, n: int = 0, m: int = 0,
                    dim: Optional[int] = None) -> FockVector:
        """Normalized single-mode input: coherent (beta), squeezed (xi) or fock (k)."""
        if kind == "coherent":
            return coherent_state(CoherentParams(complex(value)),
                                  dim or default_dim(abs(value), n, m, self.tolerances), self.tolerances)
        if kind == "squeezed":
            p = SqueezeParams(complex(value))
            return squeezed_vacuum(p, dim or default_dim_squeezed(p, n, m, self.tolerances), self.tolerances)
        if kind == "fock":
            k = int(round(abs(value)))
            return FockVector.basis(k, dim or k + 1)
        hint = self.suggest(kind, INPUT_KINDS)
        raise ParameterError(f"unknown input kind {kind!r}" + (f"; did you mean {hint[0]}?" if hint else ""))

    def conditional(self, kind: str, value: complex, idx: ConditionalIndices,
                    bs: BeamSplitterParams) -> ConditionalOutcome:
        """Conditional state, by its closed form where one exists."""
        state = self.build_input(kind, value, idx.n, idx.m)
        self.logger.debug(f"{kind} input dim={state.dim} for n={idx.n} m={idx.m}")
        if kind == "coherent":
            return psjp_pajp_coherent(CoherentParams(complex(value)), idx, bs, state.dim + idx.n, self.tolerances)
        if kind == "squeezed":
            return psjp_pajp_squeezed(SqueezeParams(complex(value)), idx, bs, state.dim + idx.n, self.tolerances)
        return jp_state_general(state, idx, bs, self.tolerances)

    def probability_map(self, kind: str, value: complex, n: int, bs: BeamSplitterParams,
                        m_max: int) -> np.ndarray:
        state = self.build_input(kind, value, n, m_max)
        return probability_map(state, n, bs, m_max, self.tolerances)

    def photon_stats(self, kind: str, value: complex, idx: ConditionalIndices,
                     bs: BeamSplitterParams) -> PhotonStats:
        if kind == "coherent":
            return photon_stats_closed(CoherentParams(complex(value)), idx, bs, tolerances=self.tolerances)
        return photon_stats_numeric(self.conditional(kind, value, idx, bs).state)

    def probability_sweep(self, pairs: Sequence[Tuple[int, int]], t2: float,
                          betas: np.ndarray) -> np.ndarray:
        """P(n, m) of coherent inputs, rows |beta|, one column per (n, m) pair."""
        bs = BeamSplitterParams.from_transmissivity(t2)
        idxs = [ConditionalIndices(n, m) for n, m in pairs]

        def row(b: float) -> List[float]:
            return [probability_closed_coherent(CoherentParams(b), idx, bs) for idx in idxs]

        return np.array(list(self.executor.map(row, [float(b) for b in betas])))

    def mixture(self, value: complex, bs: BeamSplitterParams, det: DetectorModel, k: int, n0: int,
                p: float, joint_weights: bool = False) -> ConditionalEnsemble:
        """Coherent input, binomial Fock ancilla and photon-chopping detection."""
        state = self.build_input("coherent", value)
        return detection.mixed_conditional_output(state, detection.binomial_mixture(n0, p), bs, det, k,
                                                  joint_weights, self.tolerances)

    # Grids

    def wigner(self, state: FockVector, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
        return wigner_grid(state, xs, ps, self.executor)

    def husimi(self, state: FockVector, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
        return evaluate_grid(lambda X, P: husimi_numeric(state, X, P), xs, ps, self.executor)

    def quadrature(self, state: FockVector, xs: np.ndarray, phis: np.ndarray) -> np.ndarray:
        """p(x, phi) indexed [iphi, ix]."""
        return quadrature_grid_numeric(state, xs, phis)

    def figure_data(self, fig_id: str, overrides: Optional[Dict[str, Any]] = None) -> Tuple[List[str], List[tuple]]:
        """Header and rows of the data behind a figure, presets overridden by overrides."""
        preset = dict(self.figure(fig_id))
        preset.update({k: v for k, v in (overrides or {}).items() if v is not None})
        kind = preset["kind"]
        self.logger.info(f"figure {fig_id}: {preset.get('description', kind)}")
        bs = BeamSplitterParams.from_transmissivity(float(preset["t2"]))

        if kind == "probability":
            betas = np.linspace(0.0, float(preset["beta_max"]), int(preset["points"]))
            pairs = [tuple(pr) for pr in preset["pairs"]]
            table = self.probability_sweep(pairs, float(preset["t2"]), betas)
            header = ["beta"] + [f"P({n},{m})" for n, m in pairs]
            return header, [(float(b),) + tuple(float(v) for v in r) for b, r in zip(betas, table)]

        xs, ps = phase_grid(float(preset["limit"]), int(preset["points"]))
        phis = np.linspace(0.0, math.pi, int(preset.get("phases", 61)))
        if kind.startswith("mixture"):
            det = DetectorModel(int(preset["N"]), float(preset["eta"]))
            ens = self.mixture(float(preset["beta"]), bs, det, int(preset["k"]), int(preset["n0"]), float(preset["p"]))
            self.logger.info(f"P_N,eta(k) = {ens.total_probability:.6g}")
            if kind == "mixture-wigner":
                values = detection.ensemble_observables(ens, "wigner", xs=xs, ps=ps, executor=self.executor)
                return ["x", "p", "W"], grid_rows(xs, ps, values)
            rho = detection.ensemble_density(ens)
            values = _mixed_quadrature(rho, xs, phis)
            return ["phi", "x", "value"], grid_rows(phis, xs, values)

        idx = ConditionalIndices(int(preset["n"]), int(preset["m"]))
        state = self.conditional("coherent", float(preset["beta"]), idx, bs).state
        if kind == "quadrature":
            return ["phi", "x", "value"], grid_rows(phis, xs, self.quadrature(state, xs, phis))
        if kind == "husimi":
            return ["x", "p", "Q"], grid_rows(xs, ps, self.husimi(state, xs, ps))
        if kind == "wigner":
            return ["x", "p", "W"], grid_rows(xs, ps, self.wigner(state, xs, ps))
        raise ParameterError(f"figure {fig_id} has unknown kind {kind!r}")

    def verify(self, suite: str, quick: bool = False) -> SuiteReport:
        if suite not in SUITES:
            hint = self.suggest(suite, list(SUITES))
            raise ParameterError(f"unknown suite {suite!r}" + (f"; did you mean {hint[0]}?" if hint else ""))
        report = run_suite(suite, quick)
        self.logger.info(f"suite {suite}: {'passed' if report.passed else 'FAILED'}")
        return report


def _mixed_quadrature(rho: np.ndarray, xs: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """p(x, phi) = <x,phi|rho|x,phi>, indexed [iphi, ix]."""
    dim = rho.shape[0]
    h = hermite_functions(dim - 1, np.asarray(xs, dtype=float))
    phases = np.exp(-1j * np.outer(phis, np.arange(dim)))
    out = np.empty((len(phis), len(xs)))
    for i in range(len(phis)):
        psi = phases[i][:, None] * h
        out[i] = np.real(np.einsum("kx,kl,lx->x", psi, rho, psi.conj()))
    return out
