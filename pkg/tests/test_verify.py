import pytest

from qheis.parser import parse_expression as P
from qheis.rewrite import normalize, preset
from qheis.verify import (
    derive_plane_relations,
    plane_relations_report,
    quantum_det,
    run_check,
    verify_classical_limit,
    verify_lemma_f1,
    verify_prop_bold,
    verify_prop_nonmonogenic,
    verify_theorem_monogenic,
)


def assert_matches_golden(report, config, residuals):
    seen = set()
    for rel in report.relations:
        key = (report.check, config, rel.label)
        assert key in residuals, f"no hand-derived residual for {key}"
        assert rel.residual == residuals[key], f"{rel.label}: got {rel.residual}"
        seen.add(key)
    expected = {k for k in residuals if k[:2] == (report.check, config)}
    assert seen == expected


@pytest.mark.parametrize("qjk", ["q", "table", "symbolic"])
@pytest.mark.parametrize("sign", ["as-printed", "unified"])
def test_lemma_f1(qjk, sign, residuals):
    assert_matches_golden(verify_lemma_f1(qjk, sign), f"qjk={qjk} sign={sign}", residuals)


def test_lemma_sign_clash():
    report = verify_lemma_f1("q", "as-printed")
    assert report["mixed pair x[1],p[1] with Q[1,1]"].residual == P("2*i*hbar")
    assert not report.all_zero
    assert verify_lemma_f1("q", "unified").all_zero


def test_lemma_rejects_unknown_sign():
    with pytest.raises(ValueError):
        verify_lemma_f1("q", "flipped")


def test_prop_nonmonogenic(residuals):
    assert_matches_golden(verify_prop_nonmonogenic(), "-", residuals)


def test_theorem_monogenic(residuals):
    assert_matches_golden(verify_theorem_monogenic(), "-", residuals)


def test_prop_bold(residuals):
    assert_matches_golden(verify_prop_bold(), "-", residuals)


def test_classical_limit(residuals):
    assert_matches_golden(verify_classical_limit(), "-", residuals)


def test_plane_relations(residuals):
    assert_matches_golden(plane_relations_report(), "q=symbolic", residuals)
    assert_matches_golden(plane_relations_report(True), "q=1", residuals)
    assert len(derive_plane_relations()) == 3


def test_quantum_det():
    a, b, c, d = (P(t) for t in "abcd")
    assert quantum_det(P("1"), P("0"), P("0"), P("1")) == P("1")
    assert quantum_det(a, P("0"), P("0"), d) == P("a d")
    det = quantum_det(a, b, c, d)
    assert str(det) == "a d - q * (c b)"
    assert normalize(det.limit_q1(), preset("commuting-entries")) == P("a d - b c")


def test_reports_are_deterministic():
    first = [r.to_json() for r in run_check("all")]
    second = [r.to_json() for r in run_check("all")]
    assert first == second


def test_report_rendering():
    report = verify_lemma_f1()
    text = report.to_text()
    assert text.startswith("check: lemma-f1\nconfig: qjk=q sign=as-printed")
    assert "[nonzero] mixed pair x[1],p[1] with Q[1,1]: 2*i*hbar" in text
    data = report.to_json()
    assert set(data) == {"check", "config", "relations"}
    assert all(set(r) >= {"label", "substitutions", "residual", "verdict"} for r in data["relations"])
    assert all(r["verdict"] in ("zero", "nonzero") for r in data["relations"])


def test_verdict_matches_residual():
    for report in run_check("all"):
        for rel in report.relations:
            assert (rel.verdict == "zero") == rel.residual.is_zero()


def test_unknown_check():
    with pytest.raises(KeyError):
        run_check("nope")
