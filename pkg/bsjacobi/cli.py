#!/usr/bin/env python3
"""
cli.py

Command-line surface: conditional states, event probabilities, phase-space
grids, photon statistics, detector models, figure data and verification.

Configuration precedence: flags > --config JSON > figure presets > defaults.
"""

import argparse
import cmath
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from colorama import Fore, Style, init

from . import detection
from .beamsplitter import conditional_from_mixture
from .engine import StateEngine
from .exceptions import (
    BSJacobiError,
    GridError,
    ParameterError,
    TruncationError,
    UnreachableOutcomeError,
    VerificationError,
)
from .formatters import CLIFormatter, grid_rows, write_csv, write_json
from .phasespace import (
    husimi_closed_coherent,
    phase_grid,
    quadrature_dist_closed_coherent,
    quadrature_dist_numeric,
    wigner_closed_coherent,
)
from .types import (
    BeamSplitterParams,
    CoherentParams,
    ConditionalIndices,
    DetectorModel,
    PhasePoint,
    QuadratureSpec,
)

logger = logging.getLogger("bsjacobi")

OUTPUT_ENV = "BSJACOBI_OUTPUT_DIR"
INPUT_KINDS = ("coherent", "squeezed", "fock", "mixture-file")
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


@dataclass
class RunConfig:
    """Every tunable of a CLI run."""
    input_kind: str = "coherent"
    beta: float = 2.3
    beta_phase: float = 0.0
    xi: float = 0.5
    xi_phase: float = 0.0
    fock_k: int = 0
    mixture_file: Optional[str] = None
    n: int = 0
    m: int = 0
    t2: float = 0.81
    phi_t: float = 0.0
    phi_r: float = 0.0
    N: int = 20
    eta: float = 1.0
    k: int = 0
    n0: int = 4
    p: float = 0.95
    m_max: int = 10
    phi: float = 0.0
    limit: float = 6.0
    points: int = 121
    joint_weights: bool = False
    samples: int = 0
    seed: int = 0
    output_format: str = "csv"
    output: Optional[str] = None

    def validate(self) -> "RunConfig":
        """Check parameter ranges.

        Raises:
            ParameterError: On the first invalid value
        """
        if self.input_kind not in INPUT_KINDS:
            raise ParameterError(f"input kind must be one of {', '.join(INPUT_KINDS)}, got {self.input_kind!r}")
        if self.input_kind == "mixture-file" and not self.mixture_file:
            raise ParameterError("mixture-file input needs --mixture-file")
        if not 0.0 < self.t2 < 1.0:
            raise ParameterError(f"|T|^2 must lie in (0, 1), got {self.t2}")
        if not 0.0 < self.eta <= 1.0:
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0.0 < self.p < 1.0:
            raise ParameterError(f"p must lie in (0, 1), got {self.p}")
        for name in ("n", "m", "k", "n0", "m_max", "fock_k", "samples"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.N < 1:
            raise ParameterError(f"N must be >= 1, got {self.N}")
        if self.beta < 0 or self.xi < 0:
            raise ParameterError("use --beta-phase/--xi-phase for complex amplitudes; magnitudes must be >= 0")
        if self.points < 2 or self.limit <= 0:
            raise ParameterError("grids need at least 2 points and a positive limit")
        if self.output_format not in ("csv", "json"):
            raise ParameterError(f"format must be csv or json, got {self.output_format!r}")
        return self

    @property
    def bs(self) -> BeamSplitterParams:
        return BeamSplitterParams.from_transmissivity(self.t2, self.phi_t, self.phi_r)

    @property
    def idx(self) -> ConditionalIndices:
        return ConditionalIndices(self.n, self.m)

    @property
    def detector(self) -> DetectorModel:
        return DetectorModel(self.N, self.eta)

    @property
    def input_value(self) -> complex:
        if self.input_kind == "coherent":
            return cmath.rect(self.beta, self.beta_phase)
        if self.input_kind == "squeezed":
            return cmath.rect(self.xi, self.xi_phase)
        return complex(self.fock_k)

    def axes(self):
        return phase_grid(self.limit, self.points)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors map to exit code 1."""

    def error(self, message):
        raise ParameterError(message)


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("input and beam splitter")
    g.add_argument("--input", dest="input_kind", choices=INPUT_KINDS, help="Input state kind")
    g.add_argument("--beta", type=float, help="Coherent amplitude |beta|")
    g.add_argument("--beta-phase", type=float, help="Coherent phase (rad)")
    g.add_argument("--xi", type=float, help="Squeeze magnitude |xi|")
    g.add_argument("--xi-phase", type=float, help="Squeeze phase (rad)")
    g.add_argument("--fock-k", type=int, help="Fock input photon number")
    g.add_argument("--mixture-file", help="JSON list of {weight, kind, value} input members")
    g.add_argument("-n", type=int, help="Photons in the ancilla Fock state")
    g.add_argument("-m", type=int, help="Photons detected")
    g.add_argument("--t2", type=float, help="Transmissivity |T|^2")
    g.add_argument("--phi-t", type=float, help="Transmittance phase")
    g.add_argument("--phi-r", type=float, help="Reflectance phase")
    d = parser.add_argument_group("detector and mixtures")
    d.add_argument("--N", type=int, help="Number of chopping diodes")
    d.add_argument("--eta", type=float, help="Detection efficiency")
    d.add_argument("-k", type=int, help="Number of clicks")
    d.add_argument("--n0", type=int, help="Binomial mixture size")
    d.add_argument("--p", type=float, help="Binomial mixture probability")
    d.add_argument("--m-max", type=int, help="Largest photon count tabulated")
    d.add_argument("--joint-weights", action="store_true", default=None,
                   help="Weight ensemble members by the joint Bayes probability")
    d.add_argument("--samples", type=int, help="Monte-Carlo samples (0 disables)")
    d.add_argument("--seed", type=int, help="Monte-Carlo seed")
    o = parser.add_argument_group("grids and output")
    o.add_argument("--phi", type=float, help="Local-oscillator phase")
    o.add_argument("--limit", type=float, help="Grid half-width")
    o.add_argument("--points", type=int, help="Grid points per axis")
    o.add_argument("--format", dest="output_format", choices=["csv", "json"], help="Output format")
    o.add_argument("--output", help="Output file (default: $BSJACOBI_OUTPUT_DIR/<command>.<format>)")
    o.add_argument("--config", help="JSON file of RunConfig values")
    o.add_argument("--workers", type=int, default=4, help="Grid worker threads")
    o.add_argument("--verbose", "-v", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bsjacobi", description="Conditional beam-splitter state preparation")
    sub = parser.add_subparsers(dest="command", help="Available commands")
    for name, text in [
        ("conditional", "Conditional state amplitudes, N(n,m) and P(n,m)"),
        ("prob-map", "P(n,m) over m from the two-mode oracle"),
        ("quadrature", "Quadrature distribution at one phase"),
        ("wigner", "Wigner function grid"),
        ("husimi", "Husimi function grid"),
        ("photon-stats", "Photon-number distribution, mean and Mandel Q"),
        ("chopping", "Click probabilities P(k|m) of the detector"),
        ("posterior", "Posterior over m given k clicks"),
        ("mixture", "Conditional ensemble for a binomial Fock ancilla"),
    ]:
        _common(sub.add_parser(name, help=text))
    fig = sub.add_parser("figure", help="Data behind a figure")
    fig.add_argument("fig", help="Figure id, e.g. 2b or 5a")
    _common(fig)
    ver = sub.add_parser("verify", help="Run a verification suite")
    ver.add_argument("suite", help="oracle, appendixA, appendixB, appendixC or detection")
    ver.add_argument("--quick", action="store_true", help="Reduced parameter grid")
    _common(ver)
    return parser


def resolve_config(args: argparse.Namespace, preset: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge defaults < figure preset < --config file < flags."""
    names = {f.name for f in fields(RunConfig)}
    values = asdict(RunConfig())
    if preset:
        values.update({k: v for k, v in preset.items() if k in names})
    if getattr(args, "config", None):
        try:
            with open(args.config) as f:
                loaded = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ParameterError(f"Cannot read config {args.config}: {e}") from e
        unknown = set(loaded) - names
        if unknown:
            raise ParameterError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        values.update(loaded)
    values.update({k: v for k, v in vars(args).items() if k in names and v is not None})
    return RunConfig(**values).validate()


def output_path(cfg: RunConfig, stem: str) -> Path:
    if cfg.output:
        return Path(cfg.output)
    return Path(os.environ.get(OUTPUT_ENV, ".")) / f"{stem}.{cfg.output_format}"


def emit(cfg: RunConfig, stem: str, header: Sequence[str], rows: List[tuple],
         meta: Optional[Dict[str, Any]] = None) -> Path:
    """Write rows as CSV, or rows plus metadata as JSON."""
    path = output_path(cfg, stem)
    if cfg.output_format == "csv":
        write_csv(path, header, rows)
    else:
        payload = dict(meta or {})
        payload["columns"] = list(header)
        payload["rows"] = [list(r) for r in rows]
        write_json(path, payload)
    print(f"{Fore.GREEN}✓ Wrote {path}")
    return path


def _mixture_members(engine: StateEngine, cfg: RunConfig):
    try:
        with open(cfg.mixture_file) as f:
            raw = json.load(f)
        members = []
        for entry in raw:
            value = complex(entry["value"]) if not isinstance(entry["value"], list) else complex(*entry["value"])
            state = engine.build_input(entry["kind"], value, cfg.n, cfg.m)
            members.append((float(entry["weight"]), state))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise ParameterError(f"Cannot read mixture file {cfg.mixture_file}: {e}") from e
    return members


def _input_state(engine: StateEngine, cfg: RunConfig, m: Optional[int] = None):
    return engine.build_input(cfg.input_kind, cfg.input_value, cfg.n, cfg.m if m is None else m)


def cmd_conditional(engine: StateEngine, cfg: RunConfig) -> Path:
    idx = cfg.idx
    if cfg.input_kind == "mixture-file":
        ens = conditional_from_mixture(_mixture_members(engine, cfg), idx, cfg.bs, engine.tolerances)
        CLIFormatter.print_lines(CLIFormatter.format_ensemble(ens))
        rows = [(mb.n, mb.m, float(mb.weight)) for mb in ens.members]
        meta = {"probability": ens.total_probability,
                "members": [{"weight": mb.weight, "state": mb.state.to_dict()} for mb in ens.members]}
        return emit(cfg, "conditional", ["n", "m", "weight"], rows, meta)
    outcome = engine.conditional(cfg.input_kind, cfg.input_value, idx, cfg.bs)
    CLIFormatter.print_lines(CLIFormatter.format_outcome(idx.label, outcome))
    rows = [(k, float(a.real), float(a.imag), float(abs(a) ** 2)) for k, a in enumerate(outcome.state.amps)]
    meta = {"label": idx.label, "n": idx.n, "m": idx.m, "probability": outcome.probability, "norm": outcome.norm}
    return emit(cfg, "conditional", ["k", "re", "im", "prob"], rows, meta)


def cmd_prob_map(engine: StateEngine, cfg: RunConfig) -> Path:
    probs = engine.probability_map(cfg.input_kind, cfg.input_value, cfg.n, cfg.bs, cfg.m_max)
    rows = [(m, float(p)) for m, p in enumerate(probs)]
    return emit(cfg, "prob-map", ["m", "P"], rows, {"n": cfg.n, "t2": cfg.t2})


def cmd_quadrature(engine: StateEngine, cfg: RunConfig) -> Path:
    xs, _ = cfg.axes()
    spec = QuadratureSpec(cfg.phi, xs)
    state = engine.conditional(cfg.input_kind, cfg.input_value, cfg.idx, cfg.bs).state
    numeric = quadrature_dist_numeric(state, spec)
    if cfg.input_kind == "coherent":
        closed = quadrature_dist_closed_coherent(CoherentParams(cfg.input_value), cfg.idx, cfg.bs, spec)
        rows = [(float(x), float(a), float(b)) for x, a, b in zip(xs, numeric, closed)]
        return emit(cfg, "quadrature", ["x", "value", "value_closed"], rows, {"phi": cfg.phi})
    return emit(cfg, "quadrature", ["x", "value"], [(float(x), float(a)) for x, a in zip(xs, numeric)], {"phi": cfg.phi})


def cmd_wigner(engine: StateEngine, cfg: RunConfig) -> Path:
    xs, ps = cfg.axes()
    state = engine.conditional(cfg.input_kind, cfg.input_value, cfg.idx, cfg.bs).state
    W = engine.wigner(state, xs, ps)
    if cfg.input_kind == "coherent":
        X, P = np.meshgrid(xs, ps, indexing="ij")
        closed = wigner_closed_coherent(CoherentParams(cfg.input_value), cfg.idx, cfg.bs, PhasePoint(X, P))
        logger.info(f"closed-form Wigner max deviation {float(np.max(np.abs(W - closed))):.3e}")
    logger.info(f"Wigner minimum {float(W.min()):.6g}")
    return emit(cfg, "wigner", ["x", "p", "W"], grid_rows(xs, ps, W))


def cmd_husimi(engine: StateEngine, cfg: RunConfig) -> Path:
    xs, ps = cfg.axes()
    state = engine.conditional(cfg.input_kind, cfg.input_value, cfg.idx, cfg.bs).state
    Q = engine.husimi(state, xs, ps)
    if cfg.input_kind == "coherent":
        X, P = np.meshgrid(xs, ps, indexing="ij")
        closed = husimi_closed_coherent(CoherentParams(cfg.input_value), cfg.idx, cfg.bs, PhasePoint(X, P))
        logger.info(f"closed-form Husimi max deviation {float(np.max(np.abs(Q - closed))):.3e}")
    return emit(cfg, "husimi", ["x", "p", "Q"], grid_rows(xs, ps, Q))


def cmd_photon_stats(engine: StateEngine, cfg: RunConfig) -> Path:
    stats = engine.photon_stats(cfg.input_kind, cfg.input_value, cfg.idx, cfg.bs)
    CLIFormatter.print_lines(CLIFormatter.format_stats(stats))
    rows = [(l, float(p)) for l, p in enumerate(stats.distribution)]
    meta = {k: v for k, v in stats.to_dict().items() if k != "distribution"}
    return emit(cfg, "photon-stats", ["l", "p"], rows, meta)


def cmd_chopping(engine: StateEngine, cfg: RunConfig) -> Path:
    det = cfg.detector
    matrix = detection.click_given_photons(det, cfg.m_max)
    header = ["k", "m", "P"]
    rows = []
    for m in range(cfg.m_max + 1):
        mc = detection.monte_carlo_clicks(det, m, cfg.samples, cfg.seed) if cfg.samples else None
        for k in range(det.N + 1):
            row = (k, m, float(matrix[k, m]))
            rows.append(row + ((float(mc[k]),) if mc is not None else ()))
    if cfg.samples:
        header.append("P_mc")
    return emit(cfg, "chopping", header, rows, {"N": det.N, "eta": det.eta, "seed": cfg.seed})


def cmd_posterior(engine: StateEngine, cfg: RunConfig) -> Path:
    state = _input_state(engine, cfg, m=cfg.m_max)
    prior = detection.prior_probabilities(state, cfg.n, cfg.bs, engine.tolerances)
    post = detection.posterior_photons_given_clicks(cfg.detector, prior, cfg.k, engine.tolerances)
    ev = detection.evidence(cfg.detector, prior, cfg.k)
    print(f"{Fore.CYAN}P(n={cfg.n}, k={cfg.k}) = {ev:.6g}{Style.RESET_ALL}")
    rows = [(m, float(a), float(b)) for m, (a, b) in enumerate(zip(prior, post))]
    return emit(cfg, "posterior", ["m", "prior", "posterior"], rows, {"evidence": ev, "k": cfg.k, "n": cfg.n})


def cmd_mixture(engine: StateEngine, cfg: RunConfig) -> Path:
    ens = engine.mixture(cfg.input_value, cfg.bs, cfg.detector, cfg.k, cfg.n0, cfg.p, cfg.joint_weights)
    CLIFormatter.print_lines(CLIFormatter.format_ensemble(ens))
    rows = [(n, m, float(w)) for n, m, w in detection.members_by_count(ens)]
    return emit(cfg, "mixture", ["n", "m", "weight"], rows, {"total_probability": ens.total_probability})


def cmd_figure(engine: StateEngine, cfg: RunConfig, fig: str, overrides: Dict[str, Any]) -> Path:
    header, rows = engine.figure_data(fig, overrides)
    return emit(cfg, f"fig{fig}", header, rows, {"figure": fig})


def cmd_verify(engine: StateEngine, cfg: RunConfig, suite: str, quick: bool) -> Path:
    report = engine.verify(suite, quick)
    CLIFormatter.print_lines(CLIFormatter.format_report(report))
    path = Path(cfg.output) if cfg.output else Path(os.environ.get(OUTPUT_ENV, ".")) / f"verify-{suite}.json"
    write_json(path, report.to_dict())
    if not report.passed:
        raise VerificationError(f"suite {suite} failed: "
                                + ", ".join(c.name for c in report.checks if not c.passed))
    print(f"{Fore.GREEN}✓ suite {suite} passed; report at {path}")
    return path


COMMANDS = {
    "conditional": cmd_conditional,
    "prob-map": cmd_prob_map,
    "quadrature": cmd_quadrature,
    "wigner": cmd_wigner,
    "husimi": cmd_husimi,
    "photon-stats": cmd_photon_stats,
    "chopping": cmd_chopping,
    "posterior": cmd_posterior,
    "mixture": cmd_mixture,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and map errors to exit codes."""
    init(autoreset=True)
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise ParameterError("no command given; see --help")
        engine = StateEngine(workers=args.workers, logger=logger)
        if args.verbose:
            engine.logger.setLevel(logging.DEBUG)
        with engine:
            if args.command == "figure":
                engine.load_figures()
                preset = engine.figure(args.fig)
                cfg = resolve_config(args, preset)
                overrides = {k: getattr(cfg, k) for k in preset if hasattr(cfg, k)}
                cmd_figure(engine, cfg, args.fig, overrides)
            elif args.command == "verify":
                cmd_verify(engine, resolve_config(args), args.suite, args.quick)
            else:
                COMMANDS[args.command](engine, resolve_config(args))
    except ParameterError as e:
        print(f"{Fore.RED}usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, UnreachableOutcomeError, GridError) as e:
        print(f"{Fore.RED}numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except VerificationError as e:
        print(f"{Fore.RED}verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except BSJacobiError as e:
        print(f"{Fore.RED}error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
