from __future__ import annotations

import csv
import json
import math

import pytest

from momentgrowth.cli import RunConfig, emit, load_config, main, parse_radius, radius_text, run
from momentgrowth.errors import ConfigurationError

BASE = {
    "schema": 1,
    "spec": {"family": "power", "params": {"alpha": "2"}},
    "depth": 80,
    "analyses": ["classify", "indeterminacy", "growth", "appendix_checks"],
    "grids": {"radii": ["1", "log2:10", "log2:30"]},
    "output": {"formats": ["json", "csv-curves", "text-summary"]},
}


def test_parse_radius_forms():
    assert parse_radius("log2:3") == pytest.approx(3 * math.log(2))
    assert parse_radius("loglog:2") == pytest.approx(math.exp(2))
    assert parse_radius("10") == pytest.approx(math.log(10))
    assert parse_radius("0") == -math.inf
    assert parse_radius("log2:1e6") == pytest.approx(1e6 * math.log(2))
    assert radius_text(parse_radius("log2:5")) == "log2:5"
    with pytest.raises(ConfigurationError):
        parse_radius("-1")
    with pytest.raises(ConfigurationError):
        parse_radius("log2:abc")


def test_config_validation():
    cfg = RunConfig.from_dict(BASE, env={})
    assert cfg.precision_bits == 128 and set(cfg.analyses) == set(BASE["analyses"])
    assert RunConfig.from_dict(cfg.to_dict(), env={}) == cfg
    assert RunConfig.from_dict(BASE, env={"MOMENTGROWTH_PRECISION": "192"}).precision_bits == 192
    for bad in (
        {**BASE, "schema": 2},
        {**BASE, "analyses": ["nope"]},
        {**BASE, "spec": {"family": "nope"}},
        {**BASE, "output": {"formats": ["xml"]}},
        {**BASE, "precision_bits": 16},
        {**BASE, "grids": {"z": ["1,2,3"]}},
    ):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(bad, env={})


def test_load_config_errors(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_config(p)
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.json")


def test_run_is_reproducible(tmp_path):
    cfg = RunConfig.from_dict(BASE, env={})
    a = run(cfg).to_dict(timing=False)
    b = run(cfg).to_dict(timing=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["results"]["indeterminacy"]["verdict"] == "indeterminate_evidence"
    assert not [f for f in a["findings"] if f["level"] == "ERROR"]


def test_emit_formats(tmp_path):
    report = run(RunConfig.from_dict(BASE, env={}))
    paths = emit(report, out_dir=tmp_path)
    names = {p.name for p in paths}
    assert {"report.json", "summary.txt"} <= names
    curves = [p for p in paths if p.name.startswith("curve_")]
    assert curves
    with curves[0].open() as fh:
        header = next(csv.reader(fh))
    assert header[:2] == ["r", "logM"]
    data = json.loads((tmp_path / "report.json").read_text())
    assert "timing" in data and data["config"]["spec"]["family"] == "power"
    assert (tmp_path / "summary.txt").read_text().startswith("momentgrowth ")


def test_main_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**BASE, "spec": {"family": "nope"}}))
    assert main(["analyze", "--config", str(bad)]) == 2
    good = tmp_path / "good.json"
    good.write_text(json.dumps({**BASE, "analyses": ["classify"]}))
    assert main(["analyze", "--config", str(good), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "report.json").exists()


def test_eval_prints_csv(capsys):
    assert main(["eval", "--family", "power", "--param", "alpha=2", "--z", "0,0", "--n", "3"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["n", "P_re", "P_im", "Q_re", "Q_im"]
    assert float(rows[3][1]) == -0.25


def test_check_appendix_suite(capsys):
    assert main(["check", "--suite", "appendix"]) == 0
    assert capsys.readouterr().out.startswith("PASS 10 ")


def test_bad_param_syntax():
    assert main(["eval", "--family", "power", "--param", "alpha", "--z", "1,0", "--n", "2"]) == 2
