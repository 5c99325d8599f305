"""Command-line driver: determinism, precedence, headers and errors."""
from __future__ import annotations

import filecmp
import json
import os

import numpy as np
import pytest

from hetclaw.cli import RunConfig, build_parser, config_hash, main


def run_ok(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


def read_csv_body(path):
    lines = path.read_text().splitlines()
    head = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return head, body


# ===== Determinism =====

def test_reruns_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_ok(capsys, "--experiment", "period", "--n", "10", "--out", str(a))
    run_ok(capsys, "--experiment", "period", "--n", "10", "--out", str(b))
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for name in names:
        assert filecmp.cmp(a / name, b / name, shallow=False), name


def test_config_hash_ignores_the_output_directory():
    base = RunConfig(experiment="period", n=10, out="somewhere")
    moved = RunConfig(experiment="period", n=10, out="elsewhere")
    other = RunConfig(experiment="period", n=12, out="somewhere")
    assert config_hash(base) == config_hash(moved)
    assert config_hash(base) != config_hash(other)


# ===== Precedence =====

def test_config_file_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    out = tmp_path / "via_config"
    cfg.write_text(json.dumps({"experiment": "period", "n": 8,
                               "out": str(out)}))
    payload = run_ok(capsys, "--experiment", "simulate", "--n", "999",
                     "--config", str(cfg))
    assert payload["experiment"] == "period"
    assert (out / "period.csv").exists()
    assert not (out / "simulate.csv").exists()


def test_unknown_config_keys_are_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"experiment": "period", "bogus": 1}))
    code = main(["--config", str(cfg), "--out", str(tmp_path / "o")])
    err = json.loads(capsys.readouterr().out)
    assert code == 1
    assert err["error"] == "DomainError"


# ===== Machine-readable failure =====

def test_domain_errors_exit_nonzero_with_json(capsys, tmp_path):
    code = main(["--experiment", "period", "--model", "homogeneous",
                 "--out", str(tmp_path / "o")])
    out = capsys.readouterr().out
    assert code == 1
    err = json.loads(out)
    assert err["error"] == "DomainError"
    assert "well" in err["message"]


def test_parser_rejects_unknown_experiments():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--experiment", "nonsense"])


# ===== Headers on every artifact =====

def test_every_output_is_stamped(capsys, tmp_path):
    out = tmp_path / "stamped"
    payload = run_ok(capsys, "--experiment", "period", "--n", "10",
                     "--out", str(out))
    assert payload["outputs"]
    for path in payload["outputs"]:
        text = open(path).read()
        if path.endswith(".csv"):
            assert text.startswith("# experiment=period")
            assert "# config=" in text and "# units=" in text
        elif path.endswith(".json"):
            doc = json.loads(text)
            assert doc["experiment"] == "period"
            assert doc["config"] == payload["config"]
            assert "units" in doc
        elif path.endswith(".svg"):
            assert text.startswith("<!--")
            assert "experiment=period" in text


# ===== Experiment content =====

def test_period_table_small_amplitude_row(capsys, tmp_path):
    out = tmp_path / "period"
    run_ok(capsys, "--experiment", "period", "--n", "10", "--out", str(out))
    _, body = read_csv_body(out / "period.csv")
    assert body[0] == "p0,period,q_max"
    first = [float(tok) for tok in body[1].split(",")]
    assert first[0] == 0.01
    assert abs(first[1] / 2.0 - 1.110721) <= 1e-3
    doc = json.loads((out / "period.json").read_text())
    assert abs(doc["half_period_small_amplitude"] - 1.110721) <= 1e-3
    assert doc["shock_formation_time"] == pytest.approx(
        np.pi / (2.0 * np.sqrt(2.0)), abs=1e-8)


def test_phase_portrait_covers_all_classes(capsys, tmp_path):
    out = tmp_path / "orbits"
    run_ok(capsys, "--experiment", "phase-portrait", "--out", str(out))
    doc = json.loads((out / "phase_portrait.json").read_text())
    labels = {row["class"] for row in doc["orbits"]}
    assert labels == {"periodic", "separatrix", "escaping"}
    _, body = read_csv_body(out / "phase_portrait.csv")
    assert body[0] == "orbit,class,p0,t,q,p"
    qs = {}
    for ln in body[1:]:
        orbit, label, p0, t, q, p = ln.split(",")
        qs.setdefault(label, []).append(abs(float(q)))
    assert max(qs["periodic"]) < 1.0
    assert max(qs["separatrix"]) < 1.0
    assert max(qs["escaping"]) > 5.0


def test_simulate_reports_the_formation_time(capsys, tmp_path):
    out = tmp_path / "sim"
    run_ok(capsys, "--experiment", "simulate", "--n", "400", "--out", str(out))
    doc = json.loads((out / "simulate.json").read_text())
    t_star = doc["shock_formation_time"]
    assert t_star is not None
    assert 1.0 <= t_star <= 1.25
    assert doc["snapshot_times"] == [0.5, 1.0, 1.2, 2.5]
    _, body = read_csv_body(out / "simulate.csv")
    assert body[0] == "t,x,u,asymptote"


def test_exact_rows_cover_requested_times(capsys, tmp_path):
    out = tmp_path / "exact"
    run_ok(capsys, "--experiment", "exact", "--n", "16",
           "--times", "0.5,1.5", "--out", str(out))
    _, body = read_csv_body(out / "exact.csv")
    assert body[0] == "t,x,u"
    times = {float(ln.split(",")[0]) for ln in body[1:]}
    assert times == {0.5, 1.5}
    assert len(body) - 1 == 2 * 16


def test_inverse_reports_a_monotone_footprint(capsys, tmp_path):
    out = tmp_path / "inv"
    run_ok(capsys, "--experiment", "inverse", "--n", "400", "--out", str(out))
    doc = json.loads((out / "inverse.json").read_text())
    report = doc["report"]
    assert report["monotone"]
    assert report["round_trip_l1"] < 0.08
    assert doc["jump_tags"]


def test_rays_report_interior_collisions(capsys, tmp_path):
    out = tmp_path / "rays"
    run_ok(capsys, "--experiment", "rays", "--n", "7", "--out", str(out))
    doc = json.loads((out / "rays.json").read_text())
    assert doc["crossings"] or doc["exits"]
    _, body = read_csv_body(out / "rays.csv")
    assert body[0] == "ray,t,q"


def test_homogeneous_rays_fill_without_collisions(capsys, tmp_path):
    out = tmp_path / "hrays"
    run_ok(capsys, "--experiment", "rays", "--model", "homogeneous",
           "--n", "7", "--out", str(out))
    doc = json.loads((out / "rays.json").read_text())
    assert not doc["crossings"]
    assert not doc["exits"]
    assert doc["fill_ratio"] == pytest.approx(1.0, abs=0.05)
