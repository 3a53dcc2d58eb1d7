import json
import subprocess
import sys

import pytest

from twistk.catalog import ex53_table, ex74_table
from twistk.cli import dumps, main, run
from twistk.errors import ParseError
from twistk.textio import format_job, parse_job, parse_split

EX74_JOB = """\
# separable map on k<x> and k<d,u>
[field]
Q
[algebra A]
generators: x
[algebra B]
generators: d, u
[twist]
d|x -> x|d + 1|d^2
u|x -> x^2|1 + x|u
[run]
degree: 5
policy: unique
split: u ; d
"""


def _write(tmp_path, text, name="job.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_catalog_lists_fixtures():
    code, rep = run(["catalog"])
    assert code == 0
    names = [f["name"] for f in rep["result"]["fixtures"]]
    assert names == sorted(names) and "ex5_3" in names


def test_extend_fixture_reproduces_closed_form():
    code, rep = run(["extend", "--fixture", "abc(1,-1,1)", "-N", "6"])
    assert code == 0
    res = rep["result"]
    assert res["status"] == "ok"
    assert res["table"] == ex53_table(6).lines()
    assert [r["unique"] for r in res["reports"]] == [False, True, True, True]


def test_extend_reports_obstruction():
    code, rep = run(["extend", "--fixture", "b0(1)", "-N", "5"])
    assert code == 0
    assert rep["result"]["stuck"] == {"degree": 3, "reason": "inconsistent", "witness": "y|x|x + y|y|x"}


def test_unique_policy_stops_at_ambiguity():
    code, rep = run(["extend", "--fixture", "abc(1,-1,1)", "-N", "5", "--policy", "unique"])
    assert rep["result"]["stuck"]["reason"] == "ambiguous"


def test_job_file_present_and_classify(tmp_path):
    path = _write(tmp_path, EX74_JOB)
    code, rep = run(["present", "-i", path])
    assert code == 0
    res = rep["result"]
    assert res["minimal_degrees"] == {"2": 2}
    assert res["dims"] == [1, 3, 7, 15, 31, 63]
    assert res["tau_quadratic"] == {"ok": True, "witness_degree": None}
    code, rep = run(["classify", "-i", path])
    assert rep["result"]["separable_with"] is True
    assert rep["result"]["one_sided_toward_A"] is False


def test_extended_table_round_trips_through_job_text(tmp_path):
    code, rep = run(["extend", "-i", _write(tmp_path, EX74_JOB)])
    lines = rep["result"]["table"]
    assert lines == ex74_table(5).lines()
    text = format_job(ex74_table(5))
    job_path = _write(tmp_path, text, "round.txt")
    code, rep = run(["verify", "-i", job_path])
    assert code == 0 and rep["result"]["ok"] is True
    assert parse_job(text).twist_degree == 5


def test_output_is_byte_stable(tmp_path, capsys):
    path = _write(tmp_path, EX74_JOB)
    outs = []
    for _ in range(2):
        assert main(["koszul", "-i", path, "-N", "4"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["result"]["verdict"] == "koszul_to_degree"
    assert outs[0] == dumps(rep) + "\n"


def test_meta_file(tmp_path, capsys):
    meta = tmp_path / "meta.json"
    assert main(["uep", "--fixture", "ex5_3", "-N", "5", "--meta", str(meta)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"]["profile"] == {"3": False, "4": True, "5": True}
    info = json.loads(meta.read_text())
    assert info["exit_code"] == 0 and info["backend"] in ("compiled", "python")


def test_verify_reports_failure_witness():
    code, rep = run(["verify", "--fixture", "ex7_2(0,0)", "-N", "4"])
    assert code == 0
    assert rep["result"]["failure"] == {"identity": "mu_A", "witness": "y|x|x^2", "degree": 4}


@pytest.mark.parametrize(
    "text,line",
    [
        ("[field]\nQ\n[algebra A]\ngenerators: x\n[algebra B]\ngenerators: y\n[twist]\ny|x -> x^2|1 + $\n", 8),
        ("[field]\nQ\n[bogus]\n", 3),
        ("[run]\ndegree: eight\n", 2),
        ("generators: x\n", 1),
        ("[field]\nQ\n[algebra A]\ngenerators: x\n[algebra B]\ngenerators: y\n[twist]\ny|x -> x|y\ny|x -> x|y\n", 9),
    ],
)
def test_parse_errors_carry_position(tmp_path, text, line):
    code, rep = run(["verify", "-i", _write(tmp_path, text)])
    assert code == 1
    err = rep["error"]
    assert err["type"] == "ParseError"
    assert err["line"] == line and err["column"] >= 1


def test_split_parsing():
    assert parse_split("u ; d") == (("u",), ("d",))
    with pytest.raises(ParseError):
        parse_split("u d")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "twistk.cli", "catalog"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["command"] == "catalog"
