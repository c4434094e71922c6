import json
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from logrigid.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classgroup_689(capsys):
    code, out, _ = run(["classgroup", "--disc", "689", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 8 and doc["cyclic"]
    assert sorted(r["order"] for r in doc["classes"]) == [1, 2, 4, 4, 8, 8, 8, 8]


def test_classgroup_human(capsys):
    code, out, _ = run(["classgroup", "--disc", "12"], capsys)
    assert code == 0 and "narrow class number 2" in out


@pytest.mark.parametrize("args", [
    ["classgroup", "--disc", "7"],
    ["classgroup", "--disc", "16"],
    ["measure", "--disc", "689", "--prime", "13", "--level", "1"],
    ["measure", "--disc", "689", "--prime", "5", "--level", "1"],
    ["measure", "--disc", "689", "--prime", "3", "--level", "0"],
    ["measure", "--disc", "689", "--prime", "9", "--level", "1"],
    ["measure", "--disc", "689", "--prime", "2", "--level", "1"],
    ["measure", "--disc", "689", "--prime", "3"],
    ["lp", "--disc", "689", "--prime", "3", "--level", "3", "--smooth", "9", "--smooth2", "7"],
    ["lp", "--disc", "689", "--prime", "3", "--level", "3", "--smooth", "7", "--smooth2", "7"],
    ["zeta", "--disc", "689", "--class", "[1,2,3]"],
    ["zeta", "--disc", "689", "--class", "11"],
    ["table", "--disc", "689", "--prime", "3", "--level", "3", "--poly", "1,x"],
    ["nonsense"],
])
def test_invalid_input_exit_code(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 2


def test_zeta_oracle(capsys):
    code, out, _ = run(["zeta", "--disc", "5", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["oracle_agrees"]
    assert doc["classes"][0]["zeta"]["-1"] == "1/30"


def test_measure_json(capsys, tmp_path):
    code, out, _ = run(["measure", "--disc", "12", "--prime", "5", "--level", "2",
                        "--cache-dir", str(tmp_path), "--json"], capsys)
    doc = json.loads(out)["measures"]
    assert code == 0 and len(doc) == 2
    for m in doc:
        assert m["total_mass"] == "0" and m["refines"] and m["c"] == 7
        assert {"version", "provenance", "disc", "p", "c", "class", "level", "tau"} <= set(m)


def test_lp_json(capsys):
    code, out, _ = run(["lp", "--disc", "12", "--prime", "5", "--level", "4", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc) == 2
    for row in doc:
        assert row["derivative0"]["certified_mod"] == "5^2"
        assert "sqrt" not in row["derivative0"]["value"]


def test_table_json_12_5(capsys):
    code, out, _ = run(["table", "--disc", "12", "--prime", "5", "--level", "4", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["certified_mod"] == "5^1" and len(doc["classes"]) == 2
    for row in doc["classes"]:
        assert row["two_torsion"] and row["frobenius_fixed"] and row["trace_law"]
    assert all(g["consistent"] for g in doc["galois"].values())


def test_warm_cache_gives_identical_output(capsys, tmp_path):
    args = ["table", "--disc", "12", "--prime", "5", "--level", "4", "--json",
            "--cache-dir", str(tmp_path)]
    _, cold, _ = run(args, capsys)
    assert any(tmp_path.iterdir())
    _, warm, _ = run(args, capsys)
    assert cold == warm


def test_selftest_quick(capsys):
    t0 = time.time()
    code, out, _ = run(["selftest", "--quick"], capsys)
    assert code == 0 and "FAIL" not in out
    assert time.time() - t0 < 300


def test_selftest_reports_corrupted_cache(capsys, tmp_path):
    run(["selftest", "--quick", "--cache-dir", str(tmp_path)], capsys)
    path = tmp_path / "m_5_3_c5_1_1_-1_r2.json"
    doc = json.loads(path.read_text())
    x1, x2, v = doc["balls"][3]
    doc["balls"][3] = [x1, x2, str(Fraction(v) + 1)]
    path.write_text(json.dumps(doc))
    code, out, _ = run(["selftest", "--quick", "--cache-dir", str(tmp_path)], capsys)
    assert code == 1
    assert "FAIL  refinement D=5 p=3 class=[1,1,-1]" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "logrigid", "classgroup", "--disc", "5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "narrow class number 1" in res.stdout
