#!/usr/bin/env python3
"""
Tests for StateEngine and the bsjacobi command line.
"""

import csv
import json

import numpy as np
import pytest

from bsjacobi.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, build_parser, resolve_config, run
from bsjacobi.engine import FUZZY_AVAILABLE, StateEngine
from bsjacobi.exceptions import CatalogNotLoadedError, ParameterError
from bsjacobi.types import BeamSplitterParams, ConditionalIndices


@pytest.fixture
def engine(serial_executor):
    with StateEngine(executor=serial_executor) as eng:
        yield eng


def _read_csv(path):
    with open(path) as f:
        return list(csv.reader(f))


# StateEngine

def test_figures_require_loading(engine):
    with pytest.raises(CatalogNotLoadedError):
        engine.figure("2b")
    with pytest.raises(CatalogNotLoadedError):
        engine.figure_ids


def test_figure_catalog(engine):
    engine.load_figures()
    assert {"2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "8a", "8b"} <= set(engine.figure_ids)
    preset = engine.figure("8b")
    assert preset["kind"] == "mixture-wigner"
    assert preset["N"] == 20 and preset["eta"] == 0.9
    with pytest.raises(ParameterError):
        engine.figure("9z")


def test_figure_presets_are_read_only(engine):
    engine.load_figures()
    with pytest.raises(TypeError):
        engine.figure("2b")["t2"] = 0.1
    assert engine.figure("2b")["t2"] == 0.81


def test_presets_belong_to_each_engine(tmp_path, serial_executor):
    custom = tmp_path / "figures.json"
    custom.write_text(json.dumps([{"id": "2b", "kind": "probability", "t2": 0.4}]))
    with StateEngine(executor=serial_executor) as default, \
            StateEngine(figures_path=custom, executor=serial_executor) as other:
        default.load_figures()
        other.load_figures()
        assert default.figure("2b")["t2"] == 0.81
        assert other.figure("2b")["t2"] == 0.4
        custom.write_text(json.dumps([{"id": "2b", "kind": "probability", "t2": 0.25}]))
        other.load_figures()
        assert other.figure("2b")["t2"] == 0.25
        assert default.figure("2b")["t2"] == 0.81


@pytest.mark.parametrize("fig", ["3a", "8a"])
def test_quadrature_figure_columns(engine, fig):
    engine.load_figures()
    header, rows = engine.figure_data(fig, {"points": 5, "phases": 3})
    assert header == ["phi", "x", "value"]
    assert len(rows) == 15
    assert all(r[2] >= -1e-12 for r in rows)


def test_missing_catalog(tmp_path, serial_executor):
    with StateEngine(figures_path=tmp_path / "none.json", executor=serial_executor) as eng:
        with pytest.raises(ParameterError):
            eng.load_figures()


def test_malformed_catalog(tmp_path, serial_executor):
    bad = tmp_path / "figures.json"
    bad.write_text("[{\"kind\": ")
    with StateEngine(figures_path=bad, executor=serial_executor) as eng:
        with pytest.raises(ParameterError):
            eng.load_figures()


@pytest.mark.skipif(not FUZZY_AVAILABLE, reason="rapidfuzz not installed")
def test_suggestions(engine):
    assert engine.suggest("wignr", ["wigner", "husimi", "quadrature"])[0] == "wigner"
    with pytest.raises(ParameterError, match="did you mean coherent"):
        engine.build_input("coherant", 1.0)


def test_unknown_input_kind(engine):
    with pytest.raises(ParameterError):
        engine.build_input("thermal", 1.0)


def test_workers_must_be_positive():
    with pytest.raises(ParameterError):
        StateEngine(workers=0)


def test_engine_conditional_uses_closed_forms(engine, fig_bs):
    out = engine.conditional("coherent", 2.3, ConditionalIndices(2, 3), fig_bs)
    assert out.probability == pytest.approx(0.097, abs=0.005)
    sq = engine.conditional("squeezed", 0.3, ConditionalIndices(1, 2), fig_bs)
    assert np.all(sq.state.amps[0::2] == 0)


def test_probability_sweep_columns(engine):
    table = engine.probability_sweep([(2, 3), (3, 2)], 0.81, np.array([0.0, 2.3]))
    assert table.shape == (2, 2)
    assert table[0, 0] == 0.0
    assert table[1] == pytest.approx([0.097, 0.067], abs=0.005)


def test_engine_verify_unknown_suite(engine):
    with pytest.raises(ParameterError):
        engine.verify("appendixZ")


# Configuration

def test_config_precedence(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"t2": 0.4, "n": 2, "beta": 1.5}))
    args = build_parser().parse_args(["conditional", "--config", str(config), "--t2", "0.81", "-m", "3"])
    cfg = resolve_config(args, preset={"beta": 2.3, "n": 1, "limit": 5.0, "pairs": [[1, 1]]})
    assert cfg.t2 == 0.81
    assert cfg.n == 2
    assert cfg.beta == 1.5
    assert cfg.limit == 5.0
    assert cfg.m == 3
    assert cfg.bs == BeamSplitterParams.from_transmissivity(0.81)


def test_config_rejects_unknown_keys(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"transmissivity": 0.4}))
    args = build_parser().parse_args(["conditional", "--config", str(config)])
    with pytest.raises(ParameterError):
        resolve_config(args)


# Command line

def test_conditional_json(tmp_path):
    out = tmp_path / "psjp.json"
    code = run(["conditional", "-n", "2", "-m", "3", "--beta", "2.3", "--t2", "0.81",
                "--format", "json", "--output", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["label"] == "PSJP"
    assert data["probability"] == pytest.approx(0.097, abs=0.005)
    assert data["columns"] == ["k", "re", "im", "prob"]
    assert sum(r[3] for r in data["rows"]) == pytest.approx(1.0)


def test_fock_input_conditional(tmp_path):
    out = tmp_path / "fock.json"
    code = run(["conditional", "--input", "fock", "--fock-k", "2", "-n", "1", "-m", "0", "--t2", "0.5",
                "--format", "json", "--output", str(out)])
    assert code == EXIT_OK
    rows = json.loads(out.read_text())["rows"]
    assert rows[3][3] == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [
    [],
    ["conditional", "--t2", "1.5"],
    ["conditional", "--eta", "0"],
    ["conditional", "--input", "mixture-file"],
    ["figure", "9z"],
    ["verify", "appendixZ"],
    ["wigner", "--points", "1"],
])
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.setenv("BSJACOBI_OUTPUT_DIR", str(tmp_path))
    assert run(argv) == EXIT_USAGE


def test_unreachable_outcome_exit(tmp_path, monkeypatch):
    monkeypatch.setenv("BSJACOBI_OUTPUT_DIR", str(tmp_path))
    assert run(["conditional", "--input", "fock", "--fock-k", "0", "-n", "0", "-m", "1"]) == EXIT_NUMERIC
    assert run(["posterior", "--input", "fock", "--fock-k", "2", "-n", "1", "-k", "5", "--N", "4"]) == EXIT_NUMERIC


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("BSJACOBI_OUTPUT_DIR", str(tmp_path))
    assert run(["prob-map", "-n", "2", "--beta", "1.0", "--t2", "0.81", "--m-max", "4"]) == EXIT_OK
    rows = _read_csv(tmp_path / "prob-map.csv")
    assert rows[0] == ["m", "P"]
    assert len(rows) == 6


def test_chopping_table(tmp_path):
    out = tmp_path / "chop.csv"
    assert run(["chopping", "--N", "2", "--m-max", "2", "--output", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert rows[0] == ["k", "m", "P"]
    table = {(int(k), int(m)): float(p) for k, m, p in rows[1:]}
    assert table[(1, 2)] == pytest.approx(0.5)
    assert table[(2, 2)] == pytest.approx(0.5)


def test_chopping_monte_carlo_column(tmp_path):
    out = tmp_path / "chop.csv"
    assert run(["chopping", "--N", "3", "--m-max", "1", "--samples", "500", "--seed", "3",
                "--output", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert rows[0] == ["k", "m", "P", "P_mc"]


def test_photon_stats_json(tmp_path):
    out = tmp_path / "stats.json"
    assert run(["photon-stats", "-n", "0", "-m", "0", "--beta", "1.0", "--format", "json",
                "--output", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["mean"] == pytest.approx(0.81)
    assert data["mandel_q"] == pytest.approx(0.0, abs=1e-10)


def test_vacuum_mandel_q_is_null(tmp_path):
    out = tmp_path / "stats.json"
    assert run(["photon-stats", "--input", "fock", "--fock-k", "0", "--format", "json",
                "--output", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["mandel_q"] is None


def test_figure_probability_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("BSJACOBI_OUTPUT_DIR", str(tmp_path))
    assert run(["figure", "2b", "--points", "5"]) == EXIT_OK
    rows = _read_csv(tmp_path / "fig2b.csv")
    assert rows[0] == ["beta", "P(2,3)", "P(3,2)"]
    assert len(rows) == 6
    assert float(rows[-1][0]) == pytest.approx(4.0)


def test_mixture_from_file(tmp_path):
    members = tmp_path / "members.json"
    members.write_text(json.dumps([
        {"weight": 0.5, "kind": "fock", "value": 1},
        {"weight": 0.5, "kind": "fock", "value": 3},
    ]))
    out = tmp_path / "mix.json"
    code = run(["conditional", "--input", "mixture-file", "--mixture-file", str(members),
                "-n", "1", "-m", "2", "--t2", "0.4", "--format", "json", "--output", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert len(data["rows"]) == 2
    assert sum(r[2] for r in data["rows"]) == pytest.approx(1.0)


def test_verify_writes_report(tmp_path):
    out = tmp_path / "report.json"
    assert run(["verify", "appendixA", "--quick", "--output", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["suite"] == "appendixA"
    assert report["passed"] is True
