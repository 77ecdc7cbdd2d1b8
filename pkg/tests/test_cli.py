import json
import subprocess
import sys

import pytest

from gtl import catalog
from gtl.cli import main
from gtl.io import groupoid_to_dict
from gtl.groupoid import pair_groupoid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_traces_canonicity_flags(capsys):
    code, out, _ = run(capsys, "--format", "json", "traces", "z2-3pt.json")
    assert code == 0
    data = json.loads(out)
    assert data["canonical"] == [True, False, False]
    assert [t["measure"] for t in data["traces"]][1:] == [{"1": "0", "2": "0", "3": "1"}] * 2


def test_check_free(capsys):
    assert run(capsys, "check-free", "z2-3pt.json", "--measure", "1=1/2,2=1/2,3=0")[0] == 0
    code, out, _ = run(capsys, "check-free", "z2-3pt", "--measure", "3=1")
    assert code == 1 and "(3,s)" in out
    assert run(capsys, "check-free", "z2-3pt", "--measure", "1=1")[0] == 2  # not invariant


def test_validate(capsys, tmp_path):
    bad = tmp_path / "malformed.json"
    bad.write_text('{"arrows": [')
    assert run(capsys, "validate", str(bad))[0] == 2
    d = groupoid_to_dict(pair_groupoid(2))
    d["inverse"]["(1,2)"] = "(1,2)"
    p = tmp_path / "badinv.json"
    p.write_text(json.dumps(d))
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "inverse axiom violated at (1,2)" in out
    good = tmp_path / "good.json"
    good.write_text(catalog.data_file("pair2.json").read_text())
    assert run(capsys, "validate", str(good))[0] == 0


def test_unknown_target_and_usage(capsys):
    assert run(capsys, "info", "no-such-thing")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check-free", "z2-3pt")[0] == 2
    assert run(capsys, "--tol", "-1", "info", "pair2")[0] == 2


def test_info_and_measures(capsys):
    code, out, _ = run(capsys, "--format", "json", "info", "z2-3pt")
    d = json.loads(out)
    assert code == 0 and d["orbits"] == [["1", "2"], ["3"]] and d["isotropy_off_units"] == ["(3,s)"]
    code, out, _ = run(capsys, "measures", "z2-3pt", "--format", "json")
    assert json.loads(out)["vertices"] == [{"1": "1/2", "2": "1/2", "3": "0"}, {"1": "0", "2": "0", "3": "1"}]


def test_tau_fix(capsys):
    code, out, _ = run(capsys, "--format", "json", "tau-fix", "z2-3pt", "--measure", "1=1/4,2=1/4,3=1/2")
    d = json.loads(out)
    assert code == 0 and d["values"]["(3,s)"] == ["1/2", "0"] and d["equals_tau_mu"] is False


def test_check_canonical(capsys, tmp_path):
    assert run(capsys, "check-canonical", "z2-3pt", "--trace", '{"1": ["1/2", "0"], "2": ["1/2", "0"]}')[0] == 0
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"values": {"pt": ["1", "0"], "(pt,s)": ["1", "0"]}}))
    code, out, _ = run(capsys, "check-canonical", "z2-on-point", "--trace", str(t))
    assert code == 1 and "(pt,s)" in out
    code, out, _ = run(capsys, "check-canonical", "z2-on-point", "--trace", '{"pt": ["1", "0"], "(pt,s)": ["2", "0"]}')
    assert code == 1 and "not a tracial state" in out
    assert run(capsys, "check-canonical", "z2-on-point", "--trace", "{oops")[0] == 2


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "pair2")
    assert code == 0 and "result: PASS" in out
    code, out, _ = run(capsys, "verify", "d3-3pt", "--format", "json", "--seed", "4")
    assert code == 0 and json.loads(out)["seed"] == 4


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--seed", "2", "--count", "2", "--max-arrows", "8")
    assert code == 0 and out.rstrip().endswith("0 violation(s)")
    assert run(capsys, "search", "--seed", "1", "--count", "1", "--max-arrows", "25")[0] == 2
    assert run(capsys, "search", "--count", "0")[0] == 2


def test_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("GTL_TOL", "1e-7")
    code, out, _ = run(capsys, "--format", "json", "traces", "pair2")
    assert json.loads(out)["tolerance"] == 1e-7
    code, out, _ = run(capsys, "--tol", "1e-8", "--format", "json", "traces", "pair2")
    assert json.loads(out)["tolerance"] == 1e-8
    monkeypatch.setenv("GTL_TOL", "zero")
    assert run(capsys, "traces", "pair2")[0] == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "gtl", "catalog"], capture_output=True, text=True)
    assert p.returncode == 0 and "z2-3pt" in p.stdout.split()
