import csv
import io
import json

import numpy as np
import pytest

from usdbound.cli import main
from usdbound.corpus import builtin_corpus, run_corpus, select_cases
from usdbound.report import CSV_COLUMNS, emit_report

EX1 = {
    "dim": 3,
    "states": [[1, 0, 0], [0.5773502691896258] * 3, [0.5773502691896258, 0.5773502691896258, -0.5773502691896258]],
}
EX3 = {
    "dim": 3,
    "states": [[1, 0, 0], [1 / 5**0.5, 2 / 5**0.5, 0], [2 / 17**0.5, 2 / 17**0.5, 3 / 17**0.5]],
    "priors": [0.1, 0.8, 0.1],
}


@pytest.fixture
def ex1_file(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(EX1))
    return str(path)


@pytest.fixture
def ex3_file(tmp_path):
    path = tmp_path / "ex3.json"
    path.write_text(json.dumps(EX3))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_bound_text(capsys, ex1_file):
    code, out = run(capsys, "bound", ex1_file)
    assert code == 0
    assert "0.4444" in out.out


def test_bound_json(capsys, ex3_file):
    code, out = run(capsys, "bound", ex3_file, "--format", "json", "--starts", "8", "--seed", "3")
    doc = json.loads(out.out)
    assert code == 0
    assert doc["value"] == pytest.approx(0.4758, abs=5e-4)
    assert doc["starts_used"] == 9


def test_solve_with_oracle(capsys, ex1_file):
    code, out = run(capsys, "solve", ex1_file, "--oracle", "--format", "json")
    doc = json.loads(out.out)
    assert code == 0
    assert doc["class"] == "Boundary"
    assert doc["p_opt"] == pytest.approx(4 / 9, abs=1e-4)
    assert doc["oracle"] <= doc["p_opt"] + 1e-9
    assert doc["povm_valid"]


def test_solve_text(capsys, ex3_file):
    code, out = run(capsys, "solve", ex3_file)
    assert code == 0
    assert "0.4632" in out.out and "Boundary" in out.out


def test_schmidt(capsys, ex1_file):
    code, out = run(capsys, "schmidt", ex1_file, "--theta", "0.5,1.0", "--format", "json")
    doc = json.loads(out.out)
    assert code == 0
    assert sum(doc["eta_norms_sq"]) == pytest.approx(3.0, abs=1e-10)
    assert doc["vidal_probability"] == pytest.approx(doc["conversion_probability"], abs=1e-12)
    assert max(doc["phase_shift_residuals"]) < 1e-12


def test_schmidt_bad_theta(capsys, ex1_file):
    code, out = run(capsys, "schmidt", ex1_file, "--theta", "0.5")
    assert code == 2
    assert "theta" in out.err


def test_closed_form(capsys, tmp_path):
    path = tmp_path / "two.json"
    path.write_text(json.dumps({"dim": 2, "states": [[1, 0], [0.6, 0.8]], "priors": [0.9, 0.1]}))
    code, out = run(capsys, "closed-form", str(path), "--format", "json")
    doc = json.loads(out.out)
    assert code == 0
    assert doc["forms"]["two_state"] == pytest.approx(1 - 2 * 0.3 * 0.6)


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "states": [[1, 0], [1, 0]]}')
    assert run(capsys, "bound", str(bad))[0] == 2
    assert run(capsys, "bound", str(tmp_path / "missing.json"))[0] == 2
    unnorm = tmp_path / "unnorm.json"
    unnorm.write_text('{"dim": 2, "states": [[2, 0], [1, 1]]}')
    assert run(capsys, "bound", str(unnorm))[0] == 2
    assert run(capsys, "bound", str(unnorm), "--normalize")[0] == 0
    assert run(capsys, "examples", "--filter", "(")[0] == 2


def test_examples_filter(capsys):
    code, out = run(capsys, "examples", "--filter", "example3", "--format", "json")
    doc = json.loads(out.out)
    assert code == 0
    (case,) = doc["cases"]
    assert case["name"] == "example3"
    assert case["bound"] == pytest.approx(0.4758, abs=5e-4)
    assert case["p_opt"] == pytest.approx(0.4632, abs=5e-4)
    assert case["bound_gap"] > 0


def test_examples_empty_match(capsys):
    code, out = run(capsys, "examples", "--filter", "no_such_case")
    assert code == 0
    assert "0 cases, 0 failed" in out.out


def test_select_cases_regex():
    names = [c.name for c in select_cases("^example1")]
    assert names == ["example1", "example1_n4_p0.2", "example1_n4_p0.5", "example1_n4_p0.8"]
    with pytest.raises(ValueError):
        select_cases("[")


def test_corpus_provenance_and_order():
    cases = builtin_corpus()
    assert [c.name for c in cases] == sorted(c.name for c in cases)
    for c in cases:
        assert c.provenance
        assert c.expected_bound is not None


@pytest.fixture(scope="module")
def small_results():
    return run_corpus("example2|two_state_p0.5_s0.3")


def test_report_formats(small_results):
    text = emit_report(small_results, "text")
    lines = text.splitlines()
    assert lines[0].split()[:3] == ["case", "bound", "expected"]
    assert "0.4429" in text

    doc = json.loads(emit_report(small_results, "json"))
    assert doc["passed"] is True
    assert [c["name"] for c in doc["cases"]] == ["example2", "two_state_p0.5_s0.3"]
    assert all(c["provenance"] for c in doc["cases"])

    rows = list(csv.DictReader(io.StringIO(emit_report(small_results, "csv"))))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert float(rows[0]["bound"]) == small_results[0].bound

    with pytest.raises(ValueError):
        emit_report(small_results, "xml")


def test_json_report_is_deterministic():
    a = emit_report(run_corpus("example1$|symmetric_s0.3", seed=5), "json")
    b = emit_report(run_corpus("example1$|symmetric_s0.3", seed=5), "json")
    assert a == b


def test_failing_case_sets_exit_code(monkeypatch, capsys):
    from usdbound import corpus

    orig = corpus.builtin_corpus

    def broken():
        cases = orig()
        return [c.__class__(**{**c.__dict__, "expected_bound": 0.1}) if c.name == "example1" else c for c in cases]

    monkeypatch.setattr(corpus, "builtin_corpus", broken)
    code, out = run(capsys, "examples", "--filter", "example1$")
    assert code == 1
    assert "FAIL" in out.out


def test_gamma_lists_are_plain_floats(small_results):
    for r in small_results:
        assert all(isinstance(x, float) for x in r.gamma)
        assert np.isfinite(r.bound_gap)
