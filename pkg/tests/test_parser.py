import pytest
from hypothesis import given, settings

from qheis.parser import ParseError, parse_expression, parse_pattern, parse_polyfunction
from qheis.terms import TensorDegreeError

from strategies import expressions


@pytest.mark.parametrize("text, column", [("x[", 2), ("x[1] +", 6), ("x[1] ** 2", 7)])
def test_syntax_error_positions(text, column):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.line == 1
    assert info.value.column == column


def test_unknown_symbol():
    with pytest.raises(ParseError) as info:
        parse_expression("x[1] + zeta")
    assert info.value.token == "zeta"


def test_nested_tensor():
    with pytest.raises(TensorDegreeError):
        parse_expression("x[1] ox x[2] ox x[3]")
    with pytest.raises(TensorDegreeError):
        parse_expression("(x[1] ox x[2]) ox x[3]")


def test_precedence():
    # ox binds looser than juxtaposition and tighter than +
    assert parse_expression("x[1] p[1] ox x[2] + f") == parse_expression("(x[1] p[1]) ox (x[2]) + (f)")


def test_index_variables_and_delta():
    env = {"j": 2, "k": 2}
    assert parse_expression("delta[j,k] * x[j]", env) == parse_expression("x[2]")
    assert parse_expression("delta[j,k] * x[j]", {"j": 1, "k": 2}).is_zero()
    with pytest.raises(ParseError):
        parse_expression("x[j]")


def test_patterns():
    g1, g2, cross = parse_pattern("x[j] ox p[k]")
    assert (g1.kind, g1.index, g2.kind, g2.index, cross) == ("coordinate", "j", "momentum", "k", True)
    g1, g2, cross = parse_pattern("b a")
    assert (g1.kind, g2.kind, cross) == ("b", "a", False)
    with pytest.raises(ParseError):
        parse_pattern("x[j] p[k] f")


def test_polyfunction_grammar():
    f = parse_polyfunction("x0^2*E[1] + x1*x2*E[2]")
    assert f.dim == 2 and f.algebra == "A"
    assert str(f) == "x1*x2*E[2] + x0^2*E[1]"
    g = parse_polyfunction("x1*be[2]")
    assert g.algebra == "B"
    assert parse_polyfunction("x1", dim=3).dim == 3


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_render_parse_round_trip(e):
    assert parse_expression(str(e)) == e
