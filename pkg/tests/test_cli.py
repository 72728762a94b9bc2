import json
from pathlib import Path

import pytest

from strongsep.cli import EXIT_ERROR, EXIT_FAILURE, EXIT_SUCCESS, main

PROGRAMS = Path(__file__).parent.parent / "programs"
LIST_MODEL = '{"stack": {"x": 1}, "heap": {"1": 2, "2": 0}}'
SHARED_TAIL = '{"stack": {"x": 1}, "heap": {"1": 2, "2": 0, "5": 2}}'


def test_sat(capsys):
    assert main(["sat", "x -> nil"]) == EXIT_SUCCESS
    assert "status: sat" in capsys.readouterr().out

    assert main(["sat", "--json", "nil -> nil"]) == EXIT_FAILURE
    assert json.loads(capsys.readouterr().out) == {"status": "unsat"}


def test_syntax_error(capsys):
    assert main(["sat", "x ->"]) == EXIT_ERROR
    assert "Error:" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["unknown"])
    assert e.value.code == EXIT_ERROR


def test_entail(capsys):
    assert main(["entail", "x -> y", "ls(x, y)"]) == EXIT_SUCCESS
    assert main(["entail", "--json", "ls(x, y)", "x -> y"]) == EXIT_FAILURE
    out = capsys.readouterr().out.splitlines()
    data = json.loads(out[-1])
    assert data["status"] == "invalid"
    assert "witness" in data


def test_check(capsys, tmp_path):
    assert main(["check", LIST_MODEL, "ls(x, nil)"]) == EXIT_SUCCESS
    assert main(["check", "--oracle", LIST_MODEL, "x -> nil"]) == EXIT_FAILURE
    assert main(["check", "--differential", LIST_MODEL, "ls(x, nil)"]) == 0

    path = tmp_path / "model.json"
    path.write_text(SHARED_TAIL)
    assert main(["check", str(path), "!emp * !emp"]) == EXIT_FAILURE
    assert main(["check", "--weak", str(path), "!emp * !emp"]) == EXIT_SUCCESS
    assert "status: holds" in capsys.readouterr().out


def test_nf(capsys):
    assert main(["nf", "--json", "emp"]) == EXIT_SUCCESS
    data = json.loads(capsys.readouterr().out)
    assert data == {"formula": "emp", "disjuncts": ["emp"]}


def test_abduce(capsys):
    assert main(["abduce", "x -> y", "ls(x, nil)"]) == EXIT_SUCCESS
    out = capsys.readouterr().out
    assert "solution: x -> y -* ls(x, nil)" in out
    assert "positive: False" in out


def test_verify(capsys):
    path = PROGRAMS / "dispose-head.prog"
    assert main(["verify", "--trace", str(path)]) == EXIT_SUCCESS
    out = capsys.readouterr().out
    assert "status: valid" in out
    assert "verified: True" in out

    path = PROGRAMS / "broken-free.prog"
    assert main(["verify", "--json", str(path)]) == EXIT_FAILURE
    data = json.loads(capsys.readouterr().out)
    assert not data["verified"]
    assert data["conditions"][0]["status"] == "error"


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "missing.prog")]) == EXIT_ERROR


def test_qbf(capsys):
    assert main(["qbf", "(exists x x)"]) == EXIT_SUCCESS
    out = capsys.readouterr().out
    assert "value: true" in out
    assert "status: sat" in out

    assert main(["qbf", "--model-check", "(forall x x)"]) == EXIT_FAILURE
    assert main(["qbf", "(forall x"]) == EXIT_ERROR
