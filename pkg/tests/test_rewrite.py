import random

import pytest
from hypothesis import given, settings

from qheis.parser import ParseError, parse_expression as P
from qheis.rewrite import (
    PRESETS,
    BudgetExceeded,
    Presentation,
    RewriteError,
    RewriteRule,
    check_identity,
    critical_pairs,
    load_presentation,
    normalize,
    parse_presentation,
    preset,
    termination_witness,
)
from qheis.terms import Expression

from strategies import expressions, gen_pool, random_expression

TENSOR_PRESETS = ("qplane", "dual-plane", "qheis2", "qheis-f")


@pytest.mark.parametrize("name, text, expected", [
    ("qplane", "x[2] ox x[1]", "q * (x[1] ox x[2])"),
    ("dual-plane", "d[1] ox d[2]", "q^-1 * (d[2] ox d[1])"),
    ("qheis2", "x[1] ox p[1]", "q * (p[1] ox x[1]) + i*hbar"),
    ("qheis2", "x[1] ox p[2]", "q * (p[2] ox x[1])"),
    ("manin-word", "x[1] x[2]", "q * (x[2] x[1])"),
    ("qheis-f", "x[1] ox p[1]", "Q[1,1] * (p[1] ox x[1]) - i*hbar * f"),
])
def test_normalize_examples(name, text, expected):
    assert normalize(P(text), preset(name)) == P(expected)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_zero_stays_zero(name):
    assert normalize(Expression(), preset(name)).is_zero()


@pytest.mark.parametrize("lhs, rhs, name", [
    ("x[1] ox x[2] - q^-1 * (x[2] ox x[1])", "0", "qheis-f"),
    ("x[1] x[2]", "q * (x[2] x[1])", "manin-word"),
    ("x[1] ox p[2] - q * (p[2] ox x[1])", "0", "qheis2"),
])
def test_check_identity_examples(lhs, rhs, name):
    assert check_identity(P(lhs), P(rhs), preset(name)).is_zero()


def test_normalization_inside_longer_words():
    # only the letters next to the tensor sign interact
    out = normalize(P("p[1] x[1] ox x[2] p[2]"), preset("qheis2"))
    assert out == P("q^-1 * (p[1] x[2] ox x[1] p[2])")


def test_degree_one_contraction():
    pres = parse_presentation("x[j] ox p[k] | any -> delta[j,k]\n")
    assert normalize(P("x[1] x[1] ox p[1] p[2]"), pres) == P("x[1] p[2]")


def test_qjk_bindings():
    e = P("x[1] ox p[2]")
    assert normalize(e, preset("qheis-f", "q")) == P("q * (p[2] ox x[1])")
    assert normalize(e, preset("qheis-f", "table")) == P("-(p[2] ox x[1])")
    assert normalize(P("x[2] ox p[2]"), preset("qheis-f", "table")) == P("-i*hbar * f")


def test_budget_and_cycles():
    loop = parse_presentation("x[j] ox x[k] | j<k -> x[k] ox x[j]\nx[j] ox x[k] | j>k -> x[k] ox x[j]\n")
    with pytest.raises(BudgetExceeded):
        normalize(P("x[1] ox x[2]"), loop)
    grow = parse_presentation("x[1] x[1] -> x[1] x[1] x[1]\n")
    with pytest.raises(BudgetExceeded):
        normalize(P("x[1] x[1]"), grow, budget=50)


def test_critical_pairs_vanish_for_tensor_presets():
    for name in TENSOR_PRESETS:
        assert all(cp.residual.is_zero() for cp in critical_pairs(preset(name), 3))
    assert critical_pairs(preset("qplane"), 2) == []


def test_inconsistent_preset_is_detected():
    bad = parse_presentation("x[j] ox p[k] -> p[k] ox x[j]\nx[j] ox p[k] -> 2 * (p[k] ox x[j])\n")
    pairs = critical_pairs(bad, 2)
    assert len(pairs) == 4
    assert all(cp.residual == -Expression.tensor_of(cp.overlap.terms[0][0][3], cp.overlap.terms[0][0][2])
               for cp in pairs)


def test_word_overlaps_detected():
    # the classical rules do not commute f with x, so overlaps p x x leave residuals
    assert any(not cp.residual.is_zero() for cp in critical_pairs(preset("classical"), 2))
    assert all(cp.residual.is_zero() for cp in critical_pairs(preset("commuting-entries"), 1))


def test_critical_pair_bound():
    with pytest.raises(ValueError):
        critical_pairs(preset("qplane"), 5)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_termination_witness(name):
    assert termination_witness(preset(name), 3) is not None


def test_no_witness_for_swap_loop():
    loop = parse_presentation("x[1] ox x[2] -> x[2] ox x[1]\nx[2] ox x[1] -> x[1] ox x[2]\n")
    assert termination_witness(loop, 2) is None


def test_rule_parsing_and_matching():
    rule = RewriteRule.parse("x[j] ox x[k] | j<k -> q^-1 * (x[k] ox x[j])")
    assert rule.cross and rule.variables() == ("j", "k")
    assert rule.match(P("x[1]").terms[0][0][2][0], P("x[2]").terms[0][0][2][0]) == {"j": 1, "k": 2}
    assert rule.match(P("x[2]").terms[0][0][2][0], P("x[1]").terms[0][0][2][0]) is None
    with pytest.raises(RewriteError):
        RewriteRule.parse("x[j] ox x[k] | j<m -> 0")
    with pytest.raises(ParseError):
        RewriteRule.parse("x[j] ox x[k]")


def test_rhs_must_not_carry_blades():
    pres = parse_presentation("x[j] ox x[k] | j<k -> E[1] x[k] ox x[j]\n")
    with pytest.raises(RewriteError):
        normalize(P("x[1] ox x[2]"), pres)


def test_presentation_file_round_trip(tmp_path):
    text = "name demo\nparam Q[j,k] = q\nsymbol f = f[1]\n" + PRESETS["qheis-f"]
    path = tmp_path / "demo.txt"
    path.write_text(text)
    pres = load_presentation(str(path))
    assert pres.name == "demo"
    assert normalize(P("x[1] ox p[1]"), pres) == P("q * (p[1] ox x[1]) - i*hbar * f[1]")
    again = parse_presentation(pres.to_text())
    assert normalize(P("x[1] ox p[1]"), again) == normalize(P("x[1] ox p[1]"), pres)


def test_presentation_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("x[j] ox x[k] | j<k -> q * (x[k] ox x[j])\nthis is not a rule\n")
    with pytest.raises(ParseError) as info:
        load_presentation(str(path))
    assert info.value.line == 2
    with pytest.raises(FileNotFoundError):
        load_presentation(str(tmp_path / "missing.txt"))
    with pytest.raises(KeyError):
        preset("nope")


def test_direction_soundness():
    # applying a rule then its reversed orientation gives back the monomial with coefficient 1
    forward = parse_presentation("x[k] ox x[j] | j<k -> q * (x[j] ox x[k])\n")
    backward = parse_presentation("x[j] ox x[k] | j<k -> q^-1 * (x[k] ox x[j])\n")
    for j, k in ((1, 2), (1, 3), (2, 3)):
        start = P(f"x[{k}] ox x[{j}]")
        assert normalize(normalize(start, forward), backward) == start


@pytest.mark.parametrize("name", TENSOR_PRESETS + ("manin-word", "classical", "qheis-fjk"))
def test_idempotence_seeded(name):
    rng = random.Random(name)
    pres = preset(name)
    for _ in range(100):
        e = random_expression(rng)
        nf = normalize(e, pres)
        assert normalize(nf, pres) == nf


@settings(max_examples=100, deadline=None)
@given(expressions, expressions)
def test_normalize_is_linear(a, b):
    pres = preset("qheis2")
    assert normalize(a + b, pres) == normalize(a, pres) + normalize(b, pres)


def test_limit_q1_presentation():
    pres = preset("qheis2").limit_q1()
    assert normalize(P("x[1] ox p[1]"), pres) == P("p[1] ox x[1] + i*hbar")
    assert normalize(P("q * x[1]"), pres) == P("x[1]")
