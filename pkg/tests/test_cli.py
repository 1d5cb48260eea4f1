import json
import os
import subprocess
import sys

import pytest

from kvhom.catalog import algebra_to_json, builtin
from kvhom.cli import main, run


def doc(argv):
    status, text, err, _ = run(argv)
    return status, (json.loads(text) if text else None), err


@pytest.mark.parametrize("argv,status", [
    (["check", "e2"], 1),
    (["check", "empty"], 0),
    (["check", "poly2", "--qmax", "3"], 0),
    (["check", "nosuch"], 2),
    (["check", "poly2", "--qmax", "9"], 2),
    (["check", "poly2", "--field", "R"], 2),
    (["homology", "e2"], 1),
    (["poisson", "extract", "example"], 0),
    (["poisson", "extract", "symmetric"], 0),
    (["poisson", "roundtrip", "symplectic"], 0),
    (["poisson", "extract"], 2),
    (["poisson", "contact", "3"], 2),
    (["bogus"], 2),
])
def test_exit_codes(argv, status):
    assert run(argv)[0] == status


def test_document_shape():
    status, d, _ = doc(["check", "poly2"])
    assert status == 0
    assert set(d) == {"schema_version", "command", "ok", "verdicts", "provenance", "sections"}
    assert d["schema_version"] == "1.0" and d["command"] == "check" and d["ok"] is True
    assert {"config", "conventions", "truncation_loss"} <= set(d["provenance"])
    assert d["provenance"]["config"]["boundary_grouping"] == "A"


def test_output_is_deterministic():
    a = run(["homology", "jetline", "--degree", "2"])[1]
    b = run(["homology", "jetline", "--degree", "2"])[1]
    assert a == b and a.endswith("\n")


def test_groupings_agree_in_output():
    _, a, _ = doc(["homology", "poly2", "--boundary-grouping", "A"])
    _, b, _ = doc(["homology", "poly2", "--boundary-grouping", "B"])
    assert a["sections"] == b["sections"]


def test_json_algebra_input(tmp_path):
    p = tmp_path / "alg.json"
    p.write_text(json.dumps(algebra_to_json(builtin("upper2"))))
    status, d, _ = doc(["check", str(p)])
    assert status == 0 and d["ok"]


def test_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"dim\": 1,\n")
    status, _, err = doc(["check", str(bad)])
    assert status == 2 and "line" in err
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"dim": 1, "mul": [[["0"]]], "colour": 1}))
    status, _, err = doc(["check", str(extra)])
    assert status == 2 and "colour" in err
    assert doc(["check", str(tmp_path / "missing.json")])[0] == 2


def test_model_input(tmp_path):
    p = tmp_path / "model.json"
    p.write_text(json.dumps({"m": 1, "d": 2}))
    status, d, _ = doc(["homology", str(p)])
    assert status == 0
    p.write_text(json.dumps({"m": 1, "d": 2, "x": 0}))
    assert doc(["homology", str(p)])[0] == 2


def test_json_chain_and_bivector(tmp_path):
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps({"m": 1, "terms": [
        {"left": [0, 1], "right": [1, 0], "coeff": "1/2"},
        {"left": [1, 0], "right": [0, 1], "coeff": "-1/2"}]}))
    status, d, _ = doc(["poisson", "extract", str(chain)])
    assert status == 0 and d["sections"]["order"] == 1
    biv = tmp_path / "biv.json"
    biv.write_text(json.dumps({"m": 2, "P": [[0, 1, [[[0, 0], "1"]]]]}))
    assert doc(["poisson", "roundtrip", str(biv)])[0] == 0
    biv.write_text(json.dumps({"m": 2, "P": [[0, 5, [[[0, 0], "1"]]]]}))
    assert doc(["poisson", "roundtrip", str(biv)])[0] == 2


def test_seed_handling(monkeypatch):
    monkeypatch.setenv("KVH_SEED", "nope")
    assert run(["check", "poly2"])[0] == 2
    monkeypatch.setenv("KVH_SEED", "7")
    _, d, _ = doc(["check", "poly2"])
    assert d["provenance"]["config"]["seed"] == 7


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check", "empty", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["ok"] is True
    assert capsys.readouterr().out == ""


def test_console_entry_point():
    env = dict(os.environ, KVH_SEED="1")
    r = subprocess.run([sys.executable, "-m", "kvhom.cli", "check", "e2"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 1
    assert json.loads(r.stdout)["ok"] is False
    r = subprocess.run([sys.executable, "-m", "kvhom.cli", "check", "nosuch"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2 and "error" in r.stderr
