import json

import pytest
from click.testing import CliRunner

from meettree.cli import EXIT_BUDGET, EXIT_INPUT, cli, main
from meettree.corpus import quasicycle_example
from meettree.errors import InputError
from meettree.io import (
    automorphism_from_json,
    automorphism_to_json,
    certificate_from_json,
    certificate_to_json,
    read_json,
    tree_from_json,
    tree_to_json,
)
from meettree.pautomorph import PartialAutomorphism
from meettree.pec import determinism_certificate, replay_certificate
from meettree.tree import MeetTree, chain


def _report(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output.strip().splitlines()[-1])


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


def test_tree_json_keeps_order_and_meets():
    tree = MeetTree.from_parents({"r": None, "a": "r", "b": "r", "c": "a"})
    data = tree_to_json(tree)
    assert data["meet"]["b,c"] == "r"
    back = tree_from_json(data)
    assert back == tree


def test_read_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"elements": [}', encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_json(str(path))
    assert f"{path}:1:" in str(err.value)


def test_unknown_label_in_map_is_rejected():
    data = {"tree": tree_to_json(chain("a", "b")), "map": [["a", "zz"]]}
    with pytest.raises(InputError):
        automorphism_from_json(data)


def test_certificate_survives_json():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    cert = determinism_certificate(p, 2)
    loaded = certificate_from_json(json.loads(json.dumps(certificate_to_json(cert))))
    assert loaded.counts == cert.counts
    assert replay_certificate(loaded)


def test_classify_command(tmp_path):
    path = _write(tmp_path, "quasi.json", automorphism_to_json(quasicycle_example()))
    report = _report(CliRunner().invoke(cli, ["classify", "--map", path]))
    assert report["command"] == "classify"
    assert report["elapsed"] is None
    assert report["seed"] == 17
    assert len(report["inputs"]["map"]) == 64
    classes = {o["points"][0]: (o["class"], o["parameter"]) for o in report["verdicts"]["orbits"]}
    assert classes["eta0"] == ("quasi-cycle", 3)
    assert classes["mu0"] == ("cycle", 3)
    assert "eta0" in report["verdicts"]["initial_points"]


def test_classify_with_separate_tree(tmp_path):
    p = quasicycle_example()
    tree_path = _write(tmp_path, "tree.json", tree_to_json(p.tree))
    map_path = _write(tmp_path, "map.json", {"map": [list(pair) for pair in p.pairs]})
    report = _report(CliRunner().invoke(cli, ["classify", "--in", tree_path, "--map", map_path]))
    assert set(report["inputs"]) == {"map", "tree"}


def test_nopair_demo_command():
    report = _report(CliRunner().invoke(cli, ["--timings", "nopair-demo"]))
    pairs = report["verdicts"]["pairs"]
    assert pairs["certificate"]["word"] == ["g1", "g1"]
    assert pairs["certificate"]["length"] == 3
    assert pairs["evaluation"] == {"first": True, "second": False}
    assert isinstance(report["elapsed"], float)


def test_nonap_command():
    report = _report(CliRunner().invoke(cli, ["nonap", "--arity", "2", "--max-size", "5"]))
    assert report["verdicts"]["verdict"] == "no amalgam"
    assert report["budget_used"]["nodes"] > 0


def test_amalgamate_total_command(tmp_path):
    fixed = {"tree": {"elements": ["b"], "leq": [], "meet": {}}, "map": [["b", "b"]]}
    side = {"tree": {"elements": ["b", "x"], "leq": [["b", "x"]], "meet": {}}, "map": [["b", "b"], ["x", "x"]]}
    args = [
        "amalgamate",
        "--base", _write(tmp_path, "base.json", fixed),
        "--left", _write(tmp_path, "left.json", side),
        "--right", _write(tmp_path, "right.json", side),
    ]
    report = _report(CliRunner().invoke(cli, args))
    assert report["verdicts"]["verdict"] == "amalgam found"
    assert report["verdicts"]["violations"] == []
    assert len(report["verdicts"]["solution"]["automorphism"]["tree"]["elements"]) == 3


def test_enumerate_is_deterministic():
    runner = CliRunner()
    first = runner.invoke(cli, ["enumerate", "--max-size", "4"])
    second = runner.invoke(cli, ["enumerate", "--max-size", "4"])
    assert first.output == second.output
    assert _report(first)["verdicts"]["counts"] == {"1": 1, "2": 1, "3": 2, "4": 4}


def test_main_exit_codes(tmp_path, monkeypatch, capsys):
    assert main(["classify", "--map", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert main(["nopair-demo", "--b", "1"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err
    monkeypatch.setenv("MEETTREE_BUDGET", "5")
    assert main(["enumerate", "--max-size", "5"]) == EXIT_BUDGET


def test_tree_errors_name_their_witnesses(tmp_path, capsys):
    bad = {"tree": {"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]}, "map": []}
    assert main(["classify", "--map", _write(tmp_path, "bad.json", bad)]) == EXIT_INPUT
    assert "non-order at ['a', 'b']" in capsys.readouterr().err
