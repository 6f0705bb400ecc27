import io
import json
import sys

import pytest

from tightcalc.cli import EXIT_FAIL, EXIT_FUEL, EXIT_OK, EXIT_USAGE, run

T0 = r"(\x.\y.x)(z (\w.w))((\w.w)(\w.w))"
OMEGA = r"(\x.x x)(\x.x x)"


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_t0_cbn(capsys):
    code, out, _ = _run(capsys, "norm", "--calculus", "cbn", T0)
    assert code == EXIT_OK
    assert out.splitlines() == [r"z (\w.w)", "m=2 e=2 size=1"]


def test_norm_trace(capsys):
    code, out, _ = _run(capsys, "norm", "--calculus", "cbn", "--trace", T0)
    assert code == EXIT_OK and out.count("\n") > 2


def test_type_id_y(capsys):
    code, out, _ = _run(capsys, "type", "--system", "V", r"(\x.x) y")
    assert code == EXIT_OK and out.strip() == "(1,1,0)"


def test_translate_cbv(capsys):
    code, out, _ = _run(capsys, "translate", "--mode", "cbv", "x y")
    assert code == EXIT_OK and out.strip() == "x !y"


def test_translate_cbn(capsys):
    code, out, _ = _run(capsys, "translate", "--mode", "cbn", "x y")
    assert out.strip() == "x !y"


@pytest.mark.parametrize("system, term", [("N", T0), ("V", T0), ("B", r"(\x.!x) !y"),
                                          ("V", r"(\x.x) y")])
def test_type_output_rechecks(capsys, tmp_path, system, term):
    code, out, _ = _run(capsys, "type", "--system", system, "--json", term)
    assert code == EXIT_OK
    triple, body = out.split("\n", 1)
    f = tmp_path / "d.json"
    f.write_text(body)
    code, out, _ = _run(capsys, "check", "--system", system, str(f))
    assert code == EXIT_OK and out.strip() == f"ok {triple}"


def test_check_rejects_tampered(capsys, tmp_path):
    _, out, _ = _run(capsys, "type", "--system", "N", "--json", T0)
    obj = json.loads(out.split("\n", 1)[1])
    obj["counters"][0] += 1
    f = tmp_path / "d.json"
    f.write_text(json.dumps(obj))
    code, _, err = _run(capsys, "check", "--system", "N", str(f))
    assert code == EXIT_FAIL and err


def test_check_stdin(capsys, monkeypatch):
    _, out, _ = _run(capsys, "type", "--system", "N", "--json", "x")
    monkeypatch.setattr(sys, "stdin", io.StringIO(out.split("\n", 1)[1]))
    code, _, _ = _run(capsys, "check", "--system", "N", "-")
    assert code == EXIT_OK


def test_term_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(T0 + "\n"))
    code, out, _ = _run(capsys, "norm", "--calculus", "cbn", "-")
    assert code == EXIT_OK and out.startswith(r"z (\w.w)")


def test_exit_codes(capsys):
    assert _run(capsys, "norm", "--calculus", "cbn", "--fuel", "20", OMEGA)[0] == EXIT_FUEL
    assert _run(capsys, "type", "--system", "N", "--fuel", "20", OMEGA)[0] == EXIT_FUEL
    assert _run(capsys, "norm", "--calculus", "cbn", r"(\x.")[0] == EXIT_USAGE
    assert _run(capsys, "norm", "--calculus", "bang", "x y")[0] == EXIT_OK
    assert _run(capsys, "type", "--system", "B", r"(!x) y")[0] == EXIT_FAIL
    assert _run(capsys, "norm")[0] == EXIT_USAGE
    assert _run(capsys, "norm", "--calculus", "cbn", "--fuel", "0", "x")[0] == EXIT_USAGE
    assert _run(capsys, "check", "--system", "N", "/nonexistent.json")[0] == EXIT_USAGE


def test_diagnostics_on_stderr(capsys):
    code, out, err = _run(capsys, "norm", "--calculus", "cbn", r"(\x.")
    assert out == "" and "error" in err


def test_verify_small(capsys):
    code, out, _ = _run(capsys, "verify", "--theorem", "confluence-f", "--max-size", "4", "--json")
    assert code == EXIT_OK
    (rep,) = json.loads(out)
    assert rep["theorem"] == "confluence-f" and rep["failed"] == []


def test_verify_failure_exit(capsys):
    code, _, _ = _run(capsys, "verify", "--theorem", "inversevr-V", "--max-size", "4")
    assert code == EXIT_FAIL
