from __future__ import annotations

import json
import re
import subprocess
import sys

import pytest

from reeb_sandwich.cli import main
from reeb_sandwich.config import load_fixture
from reeb_sandwich.emit import SCHEMA, emit_dot
from reeb_sandwich.funcspec import FunctionSpec
from reeb_sandwich.reeb import build_reeb_graph


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _write_config(tmp_path, c1, c2, window=(-3, 3)):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"name": "custom", "c1": {"expr": c1}, "c2": {"expr": c2}, "window": list(window)}))
    return str(path)


def test_analyze_writes_three_files(tmp_path, capsys):
    code, out, _ = _run(capsys, "analyze", "--fixture", "example2_t0_0.5", "--out", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["graph.dot", "plot.svg", "run.json"]
    doc = json.loads((tmp_path / "run.json").read_text())
    assert doc["schema"] == SCHEMA and doc["verdict"] == "GraphWithEnds"
    assert {"config", "functions", "graph", "invariants", "certificates", "warnings"} <= set(doc)
    assert "GraphWithEnds" in out


def test_analyze_default_directory(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert _run(capsys, "analyze", "--fixture", "thm4_parabolas")[0] == 0
    assert (tmp_path / "reeb-out" / "thm4_parabolas" / "run.json").is_file()


def test_dry_run_writes_nothing(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code, out, _ = _run(capsys, "analyze", "--fixture", "example2_t0_0.5", "--out", str(out_dir), "--dry-run")
    assert code == 0 and not out_dir.exists() and "GraphWithEnds" in out


def test_analyze_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert _run(capsys, "analyze", "--fixture", "example1_1", "--out", str(d), "--oracle")[0] == 0
    for name in ("run.json", "graph.dot", "plot.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_analyze_with_oracle_records_the_comparison(tmp_path, capsys):
    assert _run(capsys, "analyze", "--fixture", "thm4_parabolas", "--out", str(tmp_path), "--oracle")[0] == 0
    doc = json.loads((tmp_path / "run.json").read_text())
    assert doc["certificates"]["oracle"]["equal"] is True


def test_reeb_prints_dot(capsys):
    code, out, _ = _run(capsys, "reeb", "--fixture", "example2_t0_0.5")
    assert code == 0 and out.startswith('digraph "example2_t0_0.5" {')
    labels = re.findall(r'label="([A-Za-z0-9]+@[^"]+)"', out)
    assert sorted(labels) == ["Max@1", "Merge@0.5"]
    assert out.count("style=solid") == 1 and out.count("style=dashed];") == 2


def test_example_one_dot_labels_every_critical_contour(capsys):
    _, out, _ = _run(capsys, "reeb", "--fixture", "example1_1")
    labels = re.findall(r'label="([A-Za-z0-9]+)@([^"]+)"', out)
    counts = {t: sum(1 for k, _ in labels if k == t) for t in ("Min", "Merge", "Max")}
    assert len(labels) == 13 and counts == {"Min": 7, "Merge": 5, "Max": 1}
    assert {lvl for k, lvl in labels if k == "Min"} == {"0"} and out.count("style=solid") == 12


def test_reeb_dry_run_prints_invariants(capsys):
    code, out, _ = _run(capsys, "reeb", "--fixture", "example2_t0_0.5", "--dry-run")
    inv = json.loads(out)
    assert code == 0 and inv["E_compact"] == 1 and inv["b1"] == 0


def test_reeb_writes_into_out(tmp_path, capsys):
    code, out, _ = _run(capsys, "reeb", "--fixture", "thm4_parabolas", "--out", str(tmp_path))
    assert code == 0 and (tmp_path / "graph.dot").read_text().startswith("digraph")


def test_classify_prints_the_verdict(capsys):
    code, out, _ = _run(capsys, "classify", "--fixture", "example1_2")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "NotCW" and doc["basis"] == ["(2.2.3)@q=0.0"]


def test_critical_points(capsys):
    code, out, _ = _run(capsys, "critical-points", "--fixture", "example2_t0_0.5")
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"c1", "c2"} and len(doc["c1"]) == 1 and doc["c1"][0]["x"] == pytest.approx(0.0)


def test_oracle_command(capsys):
    code, out, _ = _run(capsys, "oracle", "--fixture", "example2_t0_0.5", "--nx", "4096")
    doc = json.loads(out)
    assert code == 0 and doc["comparison"]["equal"] and doc["sweep"] == doc["oracle"]


def test_verify_manifold_command(capsys):
    code, out, _ = _run(capsys, "verify-manifold", "--fixture", "example2_t0_0.5", "--samples", "500")
    doc = json.loads(out)
    assert code == 0 and doc["manifold"]["status"] == "PASS" and doc["correspondence"]["status"] == "MATCH"


def test_plot_has_rules_at_vertex_levels(capsys):
    code, out, _ = _run(capsys, "plot", "--fixture", "example2_t0_0.5")
    assert code == 0 and out.startswith("<?xml") and 'version="1.1"' in out
    assert re.findall(r">t=([^<]+)<", out) == ["0.5", "1"]
    assert out.count('class="level"') == 2 and 'class="region"' in out
    assert 'class="c1"' in out and 'class="c2"' in out and out.count('class="critical"') == 2


def test_window_override(capsys):
    _, out, _ = _run(capsys, "reeb", "--fixture", "example2_t0_0.5", "--window", "0.5", "10", "--dry-run")
    inv = json.loads(out)
    # both curves are monotone on the new window
    assert inv["vertices_by_type"] == {} and inv["E_total"] == 1 and inv["terminations"] == {"WindowTruncation": 2}


def _tails(limit, sign, left, right):
    return {
        "-inf": {"limit": limit, "sign_vs_limit": sign, "monotone_beyond": {"threshold": 0, "direction": left}},
        "+inf": {"limit": limit, "sign_vs_limit": sign, "monotone_beyond": {"threshold": 0, "direction": right}},
    }


def test_m_override(tmp_path, capsys):
    path = tmp_path / "band.json"
    path.write_text(json.dumps({
        "name": "band",
        "c1": {"expr": "-1 + 0.5*exp(-x^2)", "tails": _tails(-1, "strictly_above", "increasing", "decreasing")},
        "c2": {"expr": "1 - 0.5*exp(-x^2)", "tails": _tails(1, "strictly_below", "decreasing", "increasing")},
    }))
    # for m = 2 the whole-line slab carries two contours, closing a loop
    b1 = {m: json.loads(_run(capsys, "reeb", "--config", str(path), "--m", m, "--dry-run")[1])["b1"] for m in ("2", "3")}
    assert b1 == {"2": 1, "3": 0}


def test_custom_config_file(tmp_path, capsys):
    path = _write_config(tmp_path, "x^2", "x^2 + 1")
    code, out, _ = _run(capsys, "reeb", "--config", path, "--dry-run")
    assert code == 0 and json.loads(out)["vertices_by_type"] == {"Min": 1, "Split": 1}


def test_order_violation_exit_code(tmp_path, capsys):
    path = _write_config(tmp_path, "sin(x)", "sin(x)")
    code, _, err = _run(capsys, "reeb", "--config", path)
    assert code == 2 and "OrderViolation" in err


def test_unknown_fixture_exit_code(capsys):
    code, _, err = _run(capsys, "reeb", "--fixture", "no_such_fixture")
    assert code == 2 and "no_such_fixture" in err


def test_missing_config_exit_code(tmp_path, capsys):
    code, _, err = _run(capsys, "reeb", "--config", str(tmp_path / "missing.json"))
    assert code == 4 and "error" in err


def test_bad_expression_exit_code(tmp_path, capsys):
    path = _write_config(tmp_path, "x +* 2", "x + 1")
    assert _run(capsys, "reeb", "--config", path)[0] == 2


def test_source_is_required(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reeb"])
    assert exc.value.code == 2


def test_empty_graph_is_a_valid_digraph():
    c1 = FunctionSpec.build("c1", "x", window=(1, 2))
    c2 = FunctionSpec.build("c2", "x + 1", window=(1, 2))
    dot = emit_dot(build_reeb_graph(c1, c2), "affine")
    assert dot.startswith('digraph "affine" {') and dot.rstrip().endswith("}")
    assert "v0" not in dot and dot.count("->") == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "reeb_sandwich.cli", "reeb", "--fixture", "thm4_parabolas", "--dry-run"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["E_compact"] == 1


def test_fixture_config_round_trip():
    cfg = load_fixture("example4_surrogate")
    assert type(cfg).from_dict(cfg.to_dict()) == cfg
