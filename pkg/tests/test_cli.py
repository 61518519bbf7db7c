import csv
import io
import json

import numpy as np
import pytest

from sl2harmonic.cli import CONFIG_ENV, build_parser, load_config, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_eval_phi(capsys):
    code, out = run(capsys, "eval", "--kind", "phi", "--m", "0", "--s", "0,1", "--r-grid", "0:5:11")
    data = rows(out)
    assert code == 0 and data[0] == ["r", "re", "im"] and len(data) == 12
    assert float(data[1][1]) == 1.0 and float(data[1][2]) == 0.0


def test_eval_c_density(capsys):
    code, out = run(capsys, "eval", "--kind", "c", "--m", "2", "--s", "0,2.5")
    inv_sq = float(rows(out)[1][4])
    assert code == 0
    assert inv_sq == pytest.approx(np.pi * 2.5 * np.tanh(2.5 * np.pi), rel=1e-12)


def test_eval_poles(capsys):
    code, out = run(capsys, "eval", "--kind", "cinv-poles", "--m", "4")
    data = rows(out)
    assert code == 0 and [r[0] for r in data[1:]] == ["3/2", "1/2"]
    assert [r[2] for r in data[1:]] == ["12", "-2"]
    assert [r[4] for r in data[1:]] == ["4", "-3"]


def test_heat_transform_plancherel(tmp_path, capsys):
    h = tmp_path / "h1.csv"
    assert run(capsys, "heat", "--m", "0", "--t", "1", "--r-max", "12", "--out", str(h))[0] == 0
    code, out = run(capsys, "transform", "--in", str(h), "--axis", "0:10:101")
    data = np.array(rows(out)[1:], dtype=float)
    ref = np.exp(-(data[:, 0] ** 2 + 0.25))
    assert code == 0 and np.max(np.abs(data[:, 1] - ref)) <= 1e-4 * ref.max()
    code, out = run(capsys, "plancherel", "--in", str(h))
    assert code == 0 and abs(json.loads(out)["ratio"] - 1) <= 1e-3


def test_invert_routes_agree(capsys):
    base = ("invert", "--m", "0", "--heat", "1.0", "--r-grid", "0.5:3:6")
    _, ax = run(capsys, *base)
    _, co = run(capsys, *base, "--route", "contour")
    a, c = (np.array(rows(t)[1:], dtype=float)[:, 1] for t in (ax, co))
    assert np.max(np.abs(a - c)) <= 1e-5 * np.max(np.abs(a))


def test_resolvent_and_plot_data(tmp_path, capsys):
    out, plot = tmp_path / "r.csv", tmp_path / "p.csv"
    code, _ = run(capsys, "resolvent", "--m", "0", "--z", "2.5,0", "--r-max", "12",
                  "--out", str(out), "--plot-data", str(plot))
    assert code == 0 and out.exists()
    data = rows(plot.read_text())
    assert data[0] == ["series", "r", "value"] and {r[0] for r in data[1:]} == {"re", "im", "abs"}


def test_intertwine_demo(capsys):
    code, out = run(capsys, "intertwine", "--demo")
    rec = json.loads(out)
    assert code == 0 and (rec["n"], rec["m"]) == (0, 2) and rec["residual"] <= 5e-2


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m": 3, "alpha": 0.5, "r_max": 20.0}))
    parser = build_parser()
    got = load_config(parser.parse_args(["heat", "--t", "1", "--config", str(cfg), "--m", "5"]))
    assert (got.m, got.alpha, got.r_max) == (5, 0.5, 20.0)
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    got = load_config(parser.parse_args(["heat", "--t", "1"]))
    assert (got.m, got.alpha) == (3, 0.5)
    got = load_config(parser.parse_args(["heat", "--t", "1", "--alpha", "0"]))
    assert got.alpha == 0.0


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"quadrature_order": 3}))
    code, out = run(capsys, "eval", "--kind", "c", "--s", "0.5", "--config", str(cfg))
    assert code == 2 and json.loads(out)["error"] == "DomainError"


def test_errors_are_json(capsys):
    code, out = run(capsys, "eval", "--kind", "c", "--m", "0", "--s", "0,0")
    rec = json.loads(out)
    assert code == 2 and rec["error"] == "PoleError" and rec["command"] == "eval"
    code, out = run(capsys, "eval", "--kind", "phi", "--s", "1,2,3", "--r-grid", "0:1:3")
    assert code == 2 and json.loads(out)["error"] == "DomainError"
    code, out = run(capsys, "heat", "--t", "1", "--r-max", "5", "--out", "x.csv")
    assert code == 2
    code, out = run(capsys, "verify", "--suite", "14")
    assert code == 2


def test_verify_scorecard_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "verify", "--suite", "2", "--seed", "7", "--out", str(a))[0] == 0
    assert run(capsys, "verify", "--suite", "2", "--seed", "7", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    card = json.loads(a.read_text())
    assert set(card["checks"][0]) == {"check", "target", "measured", "pass"}


def test_verify_exit_code_counts_failures(capsys):
    # criterion 3 compares against a residue formula that is wrong for |m| >= 3
    code, out = run(capsys, "verify", "--suite", "2,3")
    assert code == 1 and json.loads(out)["failures"] == 1
