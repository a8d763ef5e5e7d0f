import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from okubo_connect.cli import (bundled, bundled_seeds, dump_spec, emit_report, load_spec, main,
                               spec_from_doc, spec_to_doc)
from okubo_connect.errors import ParseError, ValidationError
from okubo_connect.instances import DEFAULT_SHAPE, random_instance
from okubo_connect.model import validate
from okubo_connect.report import Report


def run(capsysbinary, *argv):
    code = main(list(argv))
    out = capsysbinary.readouterr().out
    return code, out


def gauss_doc():
    return json.loads(bundled("gauss.json").read_text())


def test_bundled_gauss_loads():
    spec = load_spec(str(bundled("gauss.json")))
    assert spec.n == 1 and spec.p == 1
    assert abs(spec.lam[0][0][0] - 0.3) < 1e-15
    assert abs(spec.rho1 + 0.3) < 1e-15 and abs(spec.rho2 + 0.45) < 1e-15


def test_integer_lambda_names_failing_condition():
    doc = gauss_doc()
    doc["A"] = [[[2.0, 0.0]]]
    with pytest.raises(ValidationError, match="E2_1"):
        spec_from_doc(doc)
    spec_from_doc(doc, check=False)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("A"),
    lambda d: d.__setitem__("A", [[[1.0, 0.0], [0.0, 0.0]]]),
    lambda d: d.__setitem__("n", 3),
])
def test_malformed_documents(mutate):
    doc = gauss_doc()
    mutate(doc)
    with pytest.raises(ParseError):
        spec_from_doc(doc)


def test_unreadable_file(tmp_path):
    with pytest.raises(ParseError):
        load_spec(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_spec(str(bad))


@given(st.integers(0, 200))
def test_spec_round_trip_is_exact(seed):
    spec = random_instance(seed, DEFAULT_SHAPE)
    back = spec_from_doc(json.loads(dump_spec(spec)))
    assert np.array_equal(back.A, spec.A) and np.array_equal(back.P, spec.P)
    assert back.rho1 == spec.rho1 and back.rho2 == spec.rho2
    assert back.blocks == spec.blocks and back.t_last == spec.t_last
    assert dump_spec(back) == dump_spec(spec)


def test_dump_to_file(tmp_path):
    spec = random_instance(3, DEFAULT_SHAPE)
    path = tmp_path / "s.json"
    dump_spec(spec, str(path))
    assert spec_to_doc(load_spec(str(path))) == spec_to_doc(spec)


def test_empty_report_serializes():
    d = json.loads(emit_report(Report("nothing")))
    assert d["summary"] == {"entries": 0, "pass": 0, "fail": 0}
    assert "timing" not in d
    assert b"entries: 0" in emit_report(Report("nothing"), "text")


def test_report_json_round_trip():
    rep = Report("x")
    rep.compare("a", 1 + 2j, 1 + 2j, 1e-12)
    rep.compare("b", 1.0, 2.0, 1e-12)
    rep.timing["seconds"] = 1.5
    d = json.loads(emit_report(rep, timing=True))
    back = Report.from_json(d)
    assert [e.name for e in back.entries] == ["a", "b"]
    assert back.entries[0].value == 1 + 2j
    assert (back.n_pass, back.n_fail) == (1, 1)
    assert d["summary"] == {"entries": 2, "pass": 1, "fail": 1}
    assert d["timing"] == {"seconds": 1.5}


def test_validate_command(capsysbinary):
    code, out = run(capsysbinary, "validate", str(bundled("gauss.json")))
    d = json.loads(out)
    assert code == 0 and d["summary"]["fail"] == 0
    assert any(e["name"] == "E2_1" for e in d["entries"])


def test_validate_failure_exit_code(capsysbinary, tmp_path):
    doc = gauss_doc()
    doc["A"] = [[[2.0, 0.0]]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out = run(capsysbinary, "validate", str(path))
    assert code == 1
    bad = [e["name"] for e in json.loads(out)["entries"] if not e["passed"]]
    assert "E2_1" in bad


def test_error_exit_code(capsysbinary, tmp_path):
    code, out = run(capsysbinary, "validate", str(tmp_path / "missing.json"))
    assert code == 2 and out == b""


def test_scheme_gauss(capsysbinary):
    code, out = run(capsysbinary, "scheme", "--spec", str(bundled("gauss.json")))
    d = json.loads(out)
    assert code == 0
    vals = {e["name"]: complex(*e["value"]) for e in d["entries"]}
    assert len(vals) == 6
    inf = sorted([v for k, v in vals.items() if k.startswith("inf")], key=lambda z: z.real)
    # the points at infinity carry rho1, rho2 up to the sign convention of the table
    assert np.allclose(sorted(abs(z) for z in inf), [0.3, 0.45])


def test_gauss_demo(capsysbinary):
    code, out = run(capsysbinary, "gauss-demo")
    d = json.loads(out)
    assert code == 0 and d["summary"]["fail"] == 0


def test_euler_check_sin_identity(capsysbinary):
    code, out = run(capsysbinary, "euler-check", "--relation", "sin-identity",
                    "--nu1", "0.3", "--nu2=-0.7,0.2")
    assert code == 0 and json.loads(out)["summary"]["pass"] == 1


def test_verify_is_deterministic(capsysbinary):
    argv = ("verify", "--suite", "big_generic", "--seed", "2", "--tol", "1e-6")
    c1, o1 = run(capsysbinary, *argv)
    c2, o2 = run(capsysbinary, *argv)
    assert c1 == c2 == 0 and o1 == o2
    d = json.loads(o1)
    assert d["summary"]["entries"] > 0 and d["seed"] == 2


def test_text_format(capsysbinary):
    code, out = run(capsysbinary, "validate", str(bundled("gauss.json")), "--format", "text")
    assert code == 0 and out.startswith(b"command: validate")
    assert b"fail: 0" in out


def test_random_instance_deterministic_with_margin():
    a = random_instance(11, DEFAULT_SHAPE, margin=0.1)
    b = random_instance(11, DEFAULT_SHAPE, margin=0.1)
    assert spec_to_doc(a) == spec_to_doc(b)
    assert validate(a, 0.1).passed


def test_red_ii_overwrites_rho():
    spec = random_instance(4, DEFAULT_SHAPE, case="red_ii")
    mu = [m for m, _ in spec.mu]
    assert spec.case == "red_ii"
    assert spec.rho1 == mu[-2] and spec.rho2 == mu[-1]


def test_bundled_seeds():
    seeds = bundled_seeds()
    assert seeds["seeds"] == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("argv", [
    ("--relation", "cauchy-minus"),
    ("--relation", "cauchy-plus", "--source", "inf"),
    ("--relation", "swap-symmetry", "--family", "eta0-inf", "--sign", "+"),
    ("--relation", "euler-transform", "--index", "2"),
    ("--relation", "asymptotic", "--id", "W_xi_inf"),
])
def test_euler_check_defaults_converge(capsysbinary, argv):
    code, out = run(capsysbinary, "euler-check", *argv)
    assert code == 0 and json.loads(out)["summary"]["fail"] == 0
