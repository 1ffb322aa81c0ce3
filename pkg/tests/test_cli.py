from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from conftest import CORPUS
from hstar.cli import InputError, parse_point, parse_seeds, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def corpus_file(name):
    return str(CORPUS / f"{name}.json")


def test_parse_point():
    assert parse_point("4e0+e1", 4) == (4, 1, 0, 0)
    assert parse_point(" -2*e3 + e0 ", 4) == (1, 0, 0, -2)
    assert parse_point("e1+e1", 3) == (0, 2, 0)
    for bad in ("", "4e0e1", "x", "e9", "3"):
        with pytest.raises(InputError):
            parse_point(bad, 4)


def test_parse_seeds():
    assert parse_seeds("3..5") == range(3, 6)
    for bad in ("5..3", "1-2", ""):
        with pytest.raises(InputError):
            parse_seeds(bad)


def test_hstar_command():
    code, out, _ = call("hstar", corpus_file("reeve_k3"))
    rec = json.loads(out)
    assert code == 0 and rec["hstar"] == [1, 0, 2, 0] and rec["routes_agree"]
    assert len(rec["cosets"]) == 3
    code, out, _ = call("hstar", corpus_file("reeve_k3"), "--all-points", "--seed", "4")
    assert code == 0 and json.loads(out)["hstar"] == [1, 0, 2, 0]


def test_inline_json_and_table_format():
    code, out, _ = call("--format", "table", "spanning", '{"dim": 2, "vertices": [[0,0],[1,0],[0,1]]}')
    assert code == 0 and "spanning: true" in out and "index: 1" in out
    code, out, _ = call("spanning", corpus_file("reeve_k4"), "--format", "table")
    assert "spanning: false" in out and "index: 4" in out


def test_cosets_and_circuit():
    code, out, _ = call("cosets", corpus_file("reeve_k2"))
    rec = json.loads(out)
    assert code == 0 and rec["index"] == 2
    code, out, _ = call("circuit", corpus_file("circuit6"))
    rec = json.loads(out)
    assert code == 0 and sorted(p["coeff"] for p in rec["minus"]) == [1, 13]
    assert len(rec["T_plus"]) == 6 and len(rec["T_minus"]) == 2


def test_stepfn_command():
    code, out, _ = call("stepfn", corpus_file("circuit6"), "--point", "4e0+e1")
    rec = json.loads(out)
    assert code == 0 and rec["heights"] == [2, 3, 4]
    assert rec["function"]["t_max"] == "1/5"
    values = {r["t"]: r["value"] for r in rec["range"]}
    assert values["0/1"] == "4/1" and values["4/65"] == "3/1" and values["1/5"] == "2/1"
    code, out, _ = call("--format", "table", "stepfn", corpus_file("circuit6"), "--point", "4e0+e1")
    assert code == 0 and "trace T_minus height=3" in out


def test_random_and_verify():
    code, out, _ = call("random", "--dim", "3", "--seed", "7")
    assert code == 0 and len(json.loads(out)["vertices"][0]) == 3
    code, out, _ = call("verify", "--dim", "2", "--dim", "3", "--seeds", "0..3", "--jobs", "1")
    lines = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and len({l["instance"] for l in lines}) == 8
    assert all(l["pass"] for l in lines)


def test_exit_codes_for_bad_input(tmp_path):
    assert call("hstar", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("hstar", str(bad))[0] == 1
    assert call("hstar", '{"dim": 2, "vertices": [[0,0],[1,1]]}')[0] == 1
    assert call("circuit", corpus_file("unit_cube"))[0] == 1
    assert call("stepfn", corpus_file("circuit6"), "--point", "e1")[0] == 1
    assert call("random", "--dim", "9")[0] == 1
    assert call("nosuchcommand")[0] == 1
    assert call("--help")[0] == 0


def test_corpus_matches_and_detects_drift(tmp_path):
    code, out, _ = call("corpus")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and rows and all(r["match"] and r["pass"] for r in rows)
    copy = tmp_path / "corpus"
    shutil.copytree(CORPUS, copy)
    (copy / "expected" / "reeve_k2.json").write_text("{}\n")
    code, out, _ = call("corpus", "--dir", str(copy))
    assert code == 2
    assert [r["name"] for r in map(json.loads, out.splitlines()) if not r["match"]] == ["reeve_k2"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hstar.cli", "hstar", corpus_file("reeve_k2")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["hstar"] == [1, 0, 1, 0]
