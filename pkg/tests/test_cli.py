import json

import pytest

from qfasim import zoo
from qfasim.cli import main
from qfasim.model import parse_machine, serialize_machine


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_run_accept(capsys):
    code, rep = run_json(capsys, "run", "zoo:a3", "a" * 9)
    assert code == 0
    assert set(rep) == {"command", "inputs", "results", "pass"}
    assert rep["command"] == "run"


def test_run_undetermined_exit_code(capsys):
    code, _ = run_json(capsys, "run", "zoo:coin", "a")
    assert code == 2


def test_run_reject_exit_code(capsys):
    code, _ = run_json(capsys, "run", "zoo:a3", "aaa")
    assert code == 1


def test_machine_file(tmp_path, capsys):
    path = tmp_path / "coin.json"
    path.write_text(serialize_machine(zoo.get("coin").spec))
    code, rep = run_json(capsys, "accept-prob", str(path), "a", "--method", "resolvent")
    assert code == 0 and "9/25" in json.dumps(rep["results"])


def test_missing_file_is_input_error(capsys):
    assert main(["run", "/nonexistent/machine.json", "a"]) == 3


def test_bad_suite_is_usage_error(capsys):
    assert main(["verify", "--suite", "nope"]) == 4


def test_unknown_verb_is_usage_error(capsys):
    assert main(["frobnicate"]) == 4


def test_clow_cap_refusal(capsys):
    assert main(["accept-prob", "zoo:a3", "a" * 9, "--method", "clow-check"]) == 5


def test_accept_prob_methods_agree(capsys):
    vals = []
    for method in ("series", "resolvent", "clow-check"):
        code, rep = run_json(capsys, "accept-prob", "zoo:l_eps", "1", "--method", method)
        assert code == 0
        vals.append(rep["results"]["p_acc"])
    assert vals == ["1/2"] * 3


def test_transform_writes_output(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, rep = run_json(capsys, "transform", "complement", "zoo:coin", "--n-max", "2", "-o", str(out))
    assert code == 0 and rep["pass"]
    spec = parse_machine(out.read_text())
    assert spec.accepting == zoo.get("coin").spec.rejecting


def test_zoo_listing_and_export(tmp_path, capsys):
    code, rep = run_json(capsys, "zoo")
    assert code == 0
    code = main(["zoo", "coin", "--export", str(tmp_path)])
    assert code == 0 and (tmp_path / "coin.json").exists()


def test_verify_transforms_suite(capsys):
    code, rep = run_json(capsys, "verify", "--suite", "transforms", "--n-max", "1")
    assert code == 0 and rep["pass"]


def test_analyze(capsys):
    code, rep = run_json(capsys, "analyze", "zoo:a3", "aaa")
    assert code == 0
