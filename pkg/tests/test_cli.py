import json

import pytest

from pindelay.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def graph(tmp_path, capsys):
    path = tmp_path / "g.json"
    assert main(["generate", "--n", "8", "--p", "0.5", "--seed", "2", "--out", str(path)]) == 0
    capsys.readouterr()
    return str(path)


def test_check_reports_structure(graph, capsys):
    code, out, _ = run(["check", "--graph", graph, "--pins", "0"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["hypothesis_H"] is doc["result"]["strongly_connected"]
    assert set(doc) == {"tool_version", "seed", "command", "result"}


@pytest.mark.parametrize("argv, code", [
    (["generate", "--n", "5", "--p", "2", "--seed", "1", "--out", "x.json"], 2),
    (["generate", "--n", "5"], 2),
    (["bound", "--er", "4", "0.9", "1", "--pins", "0", "--method", "nope"], 2),
    (["sweep", "--er", "4", "0.9", "1", "--pins", "0", "--axis1", "c="], 2),
    (["sweep", "--er", "4", "0.9", "1", "--pins", "0", "--axis1", "c=1", "--methods", "x"], 2),
    (["roots"], 2),
    (["bound", "--er", "4", "0.9", "1", "--pins", "0", "--c", "0"], 3),
    (["bound", "--er", "4", "0.9", "1", "--pins", "0,1", "--method", "tau_pM"], 3),
    (["bound", "--er", "4", "1", "1", "--pins", "7"], 3),
    (["simulate", "--er", "3", "1", "1", "--pins", "0", "--tau-p", "0.1", "--h", "0.5"], 3),
])
def test_exit_codes(argv, code, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv, capsys)[0] == code


def test_lambert_on_unnormalized_graph_is_a_domain_error(capsys):
    code, _, err = run(["bound", "--er", "5", "0.3", "1", "--pins", "0", "--method", "lambert",
                        "--tau", "0.3"], capsys)
    assert code == 3 and "NotNormalized" in err


def test_bound_values(capsys):
    code, out, _ = run(["bound", "--er", "1", "0", "1", "--pins", "0", "--c", "2"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["value"] == pytest.approx(0.7853981633974483)


def test_repeated_runs_are_identical(graph, capsys, tmp_path):
    argv = ["simulate", "--graph", graph, "--pins", "1", "--tau-r", "0.1", "--tau-p", "0.2",
            "--T", "1", "--seed", "9"]
    first = run(argv, capsys)[1]
    assert first == run(argv, capsys)[1]
    assert first.splitlines()[0].startswith("t,y0,")


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema": 1, "er": [1, 0, 1], "pins": "0", "c": 2.0}))
    from_config = json.loads(run(["--config", str(cfg), "bound"], capsys)[1])
    assert from_config["result"]["value"] == pytest.approx(0.7853981633974483)
    flag_wins = json.loads(run(["--config", str(cfg), "bound", "--c", "1"], capsys)[1])
    assert flag_wins["result"]["value"] == pytest.approx(1.5707963267948966)


@pytest.mark.parametrize("content", [{"schema": 2}, {"schema": 1, "colour": "red"}, "[1]"])
def test_bad_config_is_a_usage_error(tmp_path, capsys, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content if isinstance(content, str) else json.dumps(content))
    assert run(["--config", str(cfg), "bound", "--er", "1", "0", "1", "--pins", "0"], capsys)[0] == 2


def test_lyapunov_without_delay_notes_fallback(capsys):
    code, out, _ = run(["lyapunov", "--er", "3", "1", "1", "--pins", "0"], capsys)
    doc = json.loads(out)["result"]
    assert code == 0 and doc["method"] == "spectral_abscissa" and "note" in doc


def test_roots_lists_requested_count(capsys):
    code, out, _ = run(["roots", "--er", "3", "1", "1", "--pins", "0", "--tau-p", "0.5",
                        "--count", "3"], capsys)
    doc = json.loads(out)["result"]
    assert code == 0 and len(doc["roots"]) == 3
    assert doc["roots"][0] == doc["dominant"]
