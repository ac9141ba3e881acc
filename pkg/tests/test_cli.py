"""Instance files, reports, and the command line surface."""

import json
import os
import subprocess
import sys

import pytest

from spantrace.cli import main
from spantrace.generate import GenParams, random_lv_instance
from spantrace.instances import ParseError, emit_instance, parse_instance
from spantrace.suites import Check, Report, report_doc, report_emit, run_suite

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
TWO_POINT = os.path.join(FIXTURES, "two_point.json")
LV_SMALL = os.path.join(FIXTURES, "lv_small.json")

MINIMAL = """
{
 "modulus": 0,
 "base": ["z"],
 "spaces": {"S": {"elements": ["z"], "anchor": {"z": "z"}}},
 "objects": {"unit": {"space": "S", "stalks": {"z": {"ranks": {"0": 1}, "diff": {}}}}}
}
"""


def test_parse_minimal():
    inst = parse_instance(MINIMAL)
    assert inst.objects["unit"].sheaf.stalks[0].rank(0) == 1


def test_parse_error_locations():
    bad = json.loads(MINIMAL)
    del bad["objects"]["unit"]["stalks"]["z"]
    with pytest.raises(ParseError) as e:
        parse_instance(json.dumps(bad))
    assert "/objects/unit/stalks" in str(e.value)
    bad2 = json.loads(MINIMAL)
    bad2["objects"]["unit"]["space"] = "missing"
    with pytest.raises(ParseError, match="unknown space"):
        parse_instance(json.dumps(bad2))
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_instance("{nope")


def test_parse_rejects_bad_chain_data():
    bad = json.loads(MINIMAL)
    bad["objects"]["unit"]["stalks"]["z"] = {
        "ranks": {"0": 1, "1": 1, "2": 1},
        "diff": {"0": [[1]], "1": [[1]]},
    }
    with pytest.raises(ParseError, match="degree 0"):
        parse_instance(json.dumps(bad))


def test_fixtures_round_trip():
    for path in (TWO_POINT, LV_SMALL):
        text = open(path, encoding="utf-8").read()
        inst = parse_instance(text)
        assert emit_instance(inst) == text
        again = parse_instance(emit_instance(inst))
        assert emit_instance(again) == text


def test_generate_deterministic():
    a = random_lv_instance(42, GenParams())
    b = random_lv_instance(42, GenParams())
    assert emit_instance(a) == emit_instance(b)
    c = random_lv_instance(43, GenParams())
    assert emit_instance(a) != emit_instance(c)


def test_generated_instance_round_trips():
    inst = random_lv_instance(7, GenParams())
    text = emit_instance(inst)
    assert emit_instance(parse_instance(text)) == text


def test_report_shapes():
    empty = Report("oracle", 0, 0, GenParams())
    doc = report_doc(empty)
    assert doc["checks"] == []
    assert report_emit(empty, "json").endswith("\n")
    one = Report("oracle", 1, 1, GenParams())
    one.checks.append(Check(0, "thing", "pass"))
    assert '"status": "pass"' in report_emit(one, "json")
    # a failing check carries both value maps
    fail = Report("oracle", 2, 1, GenParams())
    fail.checks.append(
        Check(0, "thing", "fail", {"lhs": {"values": {"a": 1}}, "rhs": {"values": {"a": 2}}})
    )
    out = report_emit(fail, "json")
    assert '"lhs"' in out and '"rhs"' in out
    text = report_emit(fail, "text")
    assert "fail" in text and "1/2" not in text


def test_report_determinism_modulo_elapsed():
    r1 = run_suite("oracle", 5, 5)
    r2 = run_suite("oracle", 5, 5)
    d1, d2 = report_doc(r1), report_doc(r2)
    d1.pop("elapsed_seconds")
    d2.pop("elapsed_seconds")
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_cli_check_and_trace(capsys):
    assert main(["check", TWO_POINT]) == 0
    out = capsys.readouterr().out
    assert "ok:" in out
    assert main(["trace", TWO_POINT]) == 0
    doc = json.loads(capsys.readouterr().out)
    # u is the scaling loop at a: single fixed point of value 3
    assert doc["u"]["values"] == {"g": 3}
    # v is the identity: pointwise euler characteristics
    assert doc["v"]["values"] == {"a": 1, "b": 2}


def test_cli_lv(capsys):
    assert main(["lv", LV_SMALL]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["equal"] is True
    assert main(["lv", TWO_POINT]) == 2
    assert "no lv diagram" in capsys.readouterr().err


def test_cli_fuzz_and_report(capsys):
    assert main(["fuzz", "--suite", "oracle", "--seed", "3", "--count", "3"]) == 0
    out1 = capsys.readouterr().out
    doc = json.loads(out1)
    assert doc["failures"] == 0
    assert main(["fuzz", "--suite", "oracle", "--seed", "3", "--count", "3"]) == 0
    out2 = capsys.readouterr().out
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("elapsed_seconds")
    d2.pop("elapsed_seconds")
    assert d1 == d2


def test_cli_report_formats(tmp_path, capsys):
    main(["fuzz", "--suite", "triangle", "--seed", "1", "--count", "2"])
    raw = capsys.readouterr().out
    p = tmp_path / "r.json"
    p.write_text(raw)
    assert main(["report", str(p), "--format", "text"]) == 0
    text = capsys.readouterr().out
    assert "suite triangle" in text and "checks passed" in text
    assert main(["report", str(p), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out) == json.loads(raw)


def test_cli_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["fuzz", "--suite", "typo", "--seed", "1", "--count", "1"])
    assert e.value.code == 2
    missing = tmp_path / "missing.json"
    assert main(["check", str(missing)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["check", str(bad)]) == 2


def test_cli_subprocess_entry():
    env = dict(os.environ)
    proc = subprocess.run(
        [sys.executable, "-m", "spantrace", "check", TWO_POINT],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert "ok:" in proc.stdout


def test_generator_envelope_examples():
    # max-set 1 forces a one-point base
    inst = random_lv_instance(0, GenParams(max_set=1))
    assert len(inst.base) == 1
    # a default instance passes the pushforward check
    from spantrace.corrcat import CCObject
    from spantrace.dualtrace import make_dual, pairing_functorial
    from spantrace.sheafops import push

    inst42 = random_lv_instance(42, GenParams())
    rect = inst42.lv
    dx = make_dual(rect.u.source)
    dxp = make_dual(CCObject(rect.f.target, push(rect.f, rect.u.source.sheaf)))
    assert pairing_functorial(rect, dx, dxp).equal


def test_cli_fuzz_tiny_lv(capsys):
    assert main(["fuzz", "--suite", "lv", "--seed", "1", "--count", "1", "--max-set", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["failures"] == 0


def test_cli_fuzz_oracle_hundred(capsys):
    assert main(["fuzz", "--suite", "oracle", "--seed", "7", "--count", "100"]) == 0
    assert json.loads(capsys.readouterr().out)["failures"] == 0


def test_parse_error_more_locations():
    base = json.loads(MINIMAL)
    base["spaces"]["X"] = {"elements": ["a"], "anchor": {"a": "nowhere"}}
    with pytest.raises(ParseError) as e:
        parse_instance(json.dumps(base))
    assert str(e.value).startswith("/spaces/X")

    base2 = json.loads(MINIMAL)
    base2["maps"] = {"f": {"source": "S", "target": "S", "graph": {}}}
    with pytest.raises(ParseError, match="/maps/f"):
        parse_instance(json.dumps(base2))

    base3 = json.loads(MINIMAL)
    base3["morphisms"] = {
        "u": {"span": "nope", "source": "unit", "target": "unit", "maps": {}}
    }
    with pytest.raises(ParseError, match="unknown span"):
        parse_instance(json.dumps(base3))


def test_cli_fuzz_deterministic_across_processes():
    cmd = [sys.executable, "-m", "spantrace", "fuzz", "--suite", "symmetry",
           "--seed", "99", "--count", "4"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == b.returncode == 0
    da, db = json.loads(a.stdout), json.loads(b.stdout)
    da.pop("elapsed_seconds")
    db.pop("elapsed_seconds")
    assert da == db
