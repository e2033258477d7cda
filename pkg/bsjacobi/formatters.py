#!/usr/bin/env python3
"""
formatters.py

Formatting and file emission for the bsjacobi command line.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np
from tabulate import tabulate

from .types import ConditionalEnsemble, ConditionalOutcome, PhotonStats, SuiteReport


def _fmt(value: float) -> str:
    return "%.17g" % value


def _jsonable(value: Any) -> Any:
    """Convert numpy and complex values; NaN and inf become null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [_jsonable(float(value.real)), _jsonable(float(value.imag))]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a header row and numeric rows, floats at 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_json(path: Path, data: Any) -> Path:
    """Write data as JSON with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_jsonable(data), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def grid_rows(xs: np.ndarray, ps: np.ndarray, values: np.ndarray) -> List[tuple]:
    """Long-format (x, p, value) rows of a grid indexed [ix, ip]."""
    return [(float(x), float(p), float(values[i, j])) for i, x in enumerate(xs) for j, p in enumerate(ps)]


class CLIFormatter:
    """Utility class for formatting engine results for CLI display."""

    @staticmethod
    def format_outcome(label: str, outcome: ConditionalOutcome, show: int = 8) -> List[str]:
        """Format a conditional outcome.

        Args:
            label: State family label (PSJP, PAJP, JP)
            outcome: Conditional outcome to format
            show: Number of leading Fock amplitudes to tabulate

        Returns:
            List[str]: Lines for display
        """
        lines = [
            f"{label} state, n={outcome.n}, m={outcome.m}",
            f"   P(n,m): {outcome.probability:.6g}",
        ]
        if outcome.norm is not None:
            lines.append(f"   N(n,m): {outcome.norm:.6g}")
        rows = [(k, f"{a.real:+.6e}", f"{a.imag:+.6e}", f"{abs(a) ** 2:.6e}")
                for k, a in enumerate(outcome.state.amps[:show])]
        lines.append(tabulate(rows, headers=["k", "Re", "Im", "|c_k|^2"], tablefmt="simple"))
        return lines

    @staticmethod
    def format_stats(stats: PhotonStats) -> List[str]:
        q = "n/a" if math.isnan(stats.mandel_q) else f"{stats.mandel_q:+.6f}"
        return [
            f"   <n>: {stats.mean:.6f}",
            f"   <n^2>: {stats.second_moment:.6f}",
            f"   Var(n): {stats.variance:.6f}",
            f"   Mandel Q: {q}",
        ]

    @staticmethod
    def format_ensemble(ens: ConditionalEnsemble, limit: int = 10) -> List[str]:
        lines = [f"P(k) = {ens.total_probability:.6g}, {len(ens.members)} members"]
        top = sorted(ens.members, key=lambda mb: -mb.weight)[:limit]
        lines.append(tabulate([(mb.n, mb.m, f"{mb.weight:.6g}") for mb in top],
                              headers=["n", "m", "weight"], tablefmt="simple"))
        return lines

    @staticmethod
    def format_report(report: SuiteReport) -> List[str]:
        rows = [(c.name, f"{c.deviation:.3e}", f"{c.tolerance:.1e}", "ok" if c.passed else "FAIL")
                for c in report.checks]
        status = "passed" if report.passed else "FAILED"
        return [f"suite {report.suite}: {status}",
                tabulate(rows, headers=["check", "max deviation", "tolerance", ""], tablefmt="simple")]

    @staticmethod
    def print_lines(lines: List[str]) -> None:
        for ln in lines:
            print(ln)
