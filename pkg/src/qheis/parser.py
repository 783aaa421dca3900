"""Text front end shared by the CLI and presentation files.

Precedence, loosest first: ``+``/``-``, then ``ox``, then products
(juxtaposition or ``*``, with ``/ N`` for rational factors), then ``^``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .calculus import PolyFunction
from .clifford import Blade, CliffordError, Multivector
from .scalars import HBAR, I, ONE, ZERO, Q, Scalar, ScalarError
from .terms import KIND_TEXT, Atom, Expression, Gen, Power, Prod, Sum, Tensor, TensorDegreeError, canonicalize

__all__ = [
    "ParseError",
    "Token",
    "tokenize",
    "parse_expression",
    "parse_scalar",
    "parse_polyfunction",
    "parse_pattern",
    "PatternGen",
    "qjk_name",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1, token: str = "") -> None:
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = f" at {token!r}" if token else ""
        super().__init__(f"line {line}, column {column}: {message}{where}")


class NestedTensorError(ParseError, TensorDegreeError):
    """A parse error caused by tensor degree above two."""

    def __init__(self, message: str, line: int = 1, column: int = 1, token: str = "ox") -> None:
        ParseError.__init__(self, message, line, column, token)
        self.pos = (line, column)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    line: int
    column: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.column)


_TOKEN = re.compile(r"(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|!=|[\[\](),+\-*^/|<>=])")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", line, pos - line_start + 1, ch)
        tokens.append(Token(m.lastgroup, m.group(), line, pos - line_start + 1))
        pos = m.end()
    if tokens:
        last = tokens[-1]
        tokens.append(Token("eof", "", last.line, last.column))
    else:
        tokens.append(Token("eof", "", 1, 1))
    return tokens


def qjk_name(j: int, k: int) -> str:
    """Parameter name for the unordered pair {j, k}."""
    a, b = sorted((j, k))
    return f"Q[{a},{b}]"


_GEN_INDEXED = {"x": "coordinate", "p": "momentum", "d": "partial", "f": "f_comp", "df": "df"}
_GEN_PLAIN = {"f": "f", "Df": "Df_left", "fD": "Df_right", "a": "a", "b": "b", "c": "c", "d": "d"}
_SCALAR_NAMES = {"i": I, "hbar": HBAR, "q": Q, "E0": ONE}


class _Parser:
    def __init__(self, text: str, indices: Optional[Mapping[str, int]] = None) -> None:
        self.tokens = tokenize(text)
        self.i = 0
        self.env = dict(indices or {})

    # -- token helpers ------------------------------------------------
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        if tok.kind == "eof":
            return ParseError(message + " (unexpected end of input)", tok.line, tok.column, "")
        return ParseError(message, tok.line, tok.column, tok.text)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "ident") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.next()

    def expect_end(self) -> None:
        if self.peek().kind != "eof":
            raise self.error("unexpected token")

    def starts_atom(self) -> bool:
        tok = self.peek()
        return tok.kind == "num" or (tok.kind == "ident" and tok.text != "ox") or self.at("(")

    # -- grammar ------------------------------------------------------
    def parse_sum(self):
        start = self.peek()
        items = []
        sign = 1
        if self.at("+") or self.at("-"):
            sign = -1 if self.next().text == "-" else 1
        items.append((sign, self.parse_tensor()))
        while self.at("+") or self.at("-"):
            sign = -1 if self.next().text == "-" else 1
            items.append((sign, self.parse_tensor()))
        if len(items) == 1 and items[0][0] > 0:
            return items[0][1]
        return Sum(tuple(items), start.pos)

    def parse_tensor(self):
        left = self.parse_product()
        if self.at("ox"):
            tok = self.next()
            right = self.parse_product()
            if self.at("ox"):
                err = self.error("tensor degree exceeds 2 (nested 'ox')")
                raise NestedTensorError(err.message, err.line, err.column, err.token)
            return Tensor(left, right, tok.pos)
        return left

    def parse_product(self):
        start = self.peek()
        if not self.starts_atom():
            raise self.error("expected a factor")
        factors = [self.parse_power()]
        while True:
            if self.at("*"):
                self.next()
                factors.append(self.parse_power())
            elif self.at("/"):
                self.next()
                tok = self.peek()
                if tok.kind != "num":
                    raise self.error("expected an integer denominator")
                self.next()
                if int(tok.text) == 0:
                    raise self.error("division by zero", tok)
                factors.append(Atom(Scalar.const(Fraction(1, int(tok.text))), tok.pos))
            elif self.starts_atom():
                factors.append(self.parse_power())
            else:
                break
        return factors[0] if len(factors) == 1 else Prod(tuple(factors), start.pos)

    def parse_power(self):
        base = self.parse_atom()
        if self.at("^"):
            tok = self.next()
            paren = self.at("(")
            if paren:
                self.next()
            neg = self.at("-")
            if neg:
                self.next()
            num = self.peek()
            if num.kind != "num":
                raise self.error("expected an integer exponent")
            self.next()
            if paren:
                self.expect(")")
            return Power(base, -int(num.text) if neg else int(num.text), tok.pos)
        return base

    def parse_index(self) -> int:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return int(tok.text)
        if tok.kind == "ident":
            if tok.text not in self.env:
                raise self.error("unbound index variable")
            self.next()
            return self.env[tok.text]
        raise self.error("expected an index")

    def parse_indices(self) -> list[int]:
        self.expect("[")
        out = [self.parse_index()]
        while self.at(","):
            self.next()
            out.append(self.parse_index())
        self.expect("]")
        return out

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return Atom(Scalar.const(int(tok.text)), tok.pos)
        if self.at("("):
            self.next()
            inner = self.parse_sum()
            self.expect(")")
            return inner
        if tok.kind != "ident" or tok.text == "ox":
            raise self.error("expected a factor")
        self.next()
        name = tok.text
        if self.at("["):
            bracket = self.peek()
            idx = self.parse_indices()
            return self.bracketed(name, idx, tok, bracket)
        if name in _GEN_PLAIN:
            return Atom(Gen(_GEN_PLAIN[name]), tok.pos)
        if name in _SCALAR_NAMES:
            return Atom(_SCALAR_NAMES[name], tok.pos)
        raise self.error("unknown symbol", tok)

    def bracketed(self, name: str, idx: list[int], tok: Token, bracket: Token):
        try:
            if name in _GEN_INDEXED:
                if len(idx) != 1:
                    raise self.error(f"{name}[...] takes one index", bracket)
                return Atom(Gen(_GEN_INDEXED[name], idx[0]), tok.pos)
            if name == "E":
                return Atom(Blade(tuple(idx), "A"), tok.pos)
            if name == "be":
                if len(idx) != 1:
                    raise self.error("be[...] takes one index", bracket)
                return Atom(Blade(tuple(idx), "B"), tok.pos)
            if name in ("Q", "delta"):
                if len(idx) != 2 or min(idx) < 1:
                    raise self.error(f"{name}[j,k] takes two indices >= 1", bracket)
                if name == "delta":
                    return Atom(ONE if idx[0] == idx[1] else ZERO, tok.pos)
                return Atom(Scalar.param(qjk_name(*idx)), tok.pos)
        except (ValueError, CliffordError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise self.error(str(exc), tok) from None
        raise self.error("unknown indexed symbol", tok)


def _evaluate(parser: _Parser, tree) -> Expression:
    try:
        return canonicalize(tree)
    except TensorDegreeError as exc:
        line, col = exc.pos or (1, 1)
        raise NestedTensorError(str(exc), line, col, "ox") from None
    except (CliffordError, ScalarError, ValueError) as exc:
        raise ParseError(str(exc)) from None


def parse_expression(text: str, indices: Optional[Mapping[str, int]] = None) -> Expression:
    """Parse DSL text into a canonical Expression; ``indices`` binds index variables such as ``j``."""
    parser = _Parser(text, indices)
    if parser.peek().kind == "eof":
        raise parser.error("empty expression")
    tree = parser.parse_sum()
    parser.expect_end()
    return _evaluate(parser, tree)


def parse_scalar(text: str, indices: Optional[Mapping[str, int]] = None) -> Scalar:
    expr = parse_expression(text, indices)
    if not expr.is_scalar():
        raise ParseError(f"{text!r} is not a scalar")
    return expr.as_scalar()


# -- rule patterns ----------------------------------------------------------

@dataclass(frozen=True)
class PatternGen:
    """One side of a rule's left-hand pair; ``index`` is a literal, a variable name, or None."""

    kind: str
    index: int | str | None = None

    def __str__(self) -> str:
        base = KIND_TEXT[self.kind]
        return base if self.index is None else f"{base}[{self.index}]"


def parse_pattern(text: str) -> tuple[PatternGen, PatternGen, bool]:
    """Parse ``g1 ox g2`` (cross-slot) or ``g1 g2`` (adjacent in a word)."""
    parser = _Parser(text)
    gens = []
    cross = False
    while parser.peek().kind != "eof":
        if parser.at("ox"):
            if cross or len(gens) != 1:
                raise parser.error("pattern must be 'g1 ox g2' or 'g1 g2'")
            parser.next()
            cross = True
            continue
        tok = parser.next()
        if tok.kind != "ident":
            raise parser.error("expected a generator", tok)
        if parser.at("["):
            parser.next()
            itok = parser.next()
            if itok.kind == "num":
                index: int | str = int(itok.text)
            elif itok.kind == "ident":
                index = itok.text
            else:
                raise parser.error("expected an index", itok)
            parser.expect("]")
            if tok.text not in _GEN_INDEXED:
                raise parser.error("not an indexed generator", tok)
            gens.append(PatternGen(_GEN_INDEXED[tok.text], index))
        elif tok.text in _GEN_PLAIN:
            gens.append(PatternGen(_GEN_PLAIN[tok.text]))
        else:
            raise parser.error("unknown generator", tok)
    if len(gens) != 2:
        raise ParseError(f"pattern {text!r} must name exactly two generators")
    return gens[0], gens[1], cross


# -- polynomial functions ---------------------------------------------------

_COORD = re.compile(r"x(\d+)$")


@dataclass(frozen=True)
class _Coord:
    index: int


class _PolyParser(_Parser):
    def parse_tensor(self):
        if self.at("ox"):
            raise self.error("'ox' is not allowed in a polynomial function")
        node = self.parse_product()
        if self.at("ox"):
            raise self.error("'ox' is not allowed in a polynomial function")
        return node

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "ident":
            m = _COORD.match(tok.text)
            if m:
                self.next()
                return Atom(_Coord(int(m.group(1))), tok.pos)
            if tok.text in _GEN_PLAIN or tok.text in _GEN_INDEXED:
                raise self.error("operator symbols are not allowed in a polynomial function", tok)
        return super().parse_atom()


def _poly_scan(node, found: dict) -> None:
    if isinstance(node, Atom):
        v = node.value
        if isinstance(v, _Coord):
            found["max"] = max(found["max"], v.index)
        elif isinstance(v, Blade) and v.indices:
            found["max"] = max(found["max"], v.indices[-1])
            found.setdefault("algebras", set()).add(v.algebra)
        return
    if isinstance(node, Prod):
        for f in node.factors:
            _poly_scan(f, found)
    elif isinstance(node, Sum):
        for _, f in node.items:
            _poly_scan(f, found)
    elif isinstance(node, Power):
        _poly_scan(node.base, found)


def _poly_eval(node, algebra: str, dim: int) -> PolyFunction:
    if isinstance(node, Atom):
        v = node.value
        if isinstance(v, _Coord):
            return PolyFunction.coordinate(v.index, dim, algebra)
        if isinstance(v, Blade):
            return PolyFunction.constant(Multivector.blade(v.indices, algebra, dim))
        return PolyFunction.constant(Multivector.scalar(v, algebra, dim))
    if isinstance(node, Sum):
        out = PolyFunction.zero(dim, algebra)
        for sign, item in node.items:
            term = _poly_eval(item, algebra, dim)
            out = out + (term if sign > 0 else -term)
        return out
    if isinstance(node, Prod):
        out = PolyFunction.constant(Multivector.scalar(1, algebra, dim))
        for f in node.factors:
            out = out * _poly_eval(f, algebra, dim)
        return out
    if isinstance(node, Power):
        base = _poly_eval(node.base, algebra, dim)
        if node.exp < 0:
            if not base.is_constant() or len(base.terms) != 1 or len(base.terms[0][1].terms) != 1:
                raise ValueError("negative powers need a single scalar")
            (blade, coeff), = base.terms[0][1].terms
            if not blade.is_unit():
                raise ValueError("negative powers need a single scalar")
            return PolyFunction.constant(Multivector.scalar(coeff**node.exp, algebra, dim))
        out = PolyFunction.constant(Multivector.scalar(1, algebra, dim))
        for _ in range(node.exp):
            out = out * base
        return out
    raise TypeError(node)


def parse_polyfunction(text: str, dim: Optional[int] = None, algebra: Optional[str] = None) -> PolyFunction:
    """Parse ``x0^2*E[1] + x1*x2*E[2]``; dimension and algebra are inferred unless given."""
    parser = _PolyParser(text)
    if parser.peek().kind == "eof":
        raise parser.error("empty expression")
    tree = parser.parse_sum()
    parser.expect_end()
    found = {"max": 0}
    _poly_scan(tree, found)
    algebras = found.get("algebras", set())
    if len(algebras) > 1:
        raise ParseError("cannot mix A_m and B_p blades")
    if algebra and algebras and algebras != {algebra}:
        raise CliffordError(f"expected {algebra} blades, found {algebras.pop()} blades")
    algebra = algebra or (algebras.pop() if algebras else "A")
    if dim is None:
        dim = max(found["max"], 1)
    elif found["max"] > dim:
        raise ParseError(f"index {found['max']} exceeds dimension {dim}")
    try:
        return _poly_eval(tree, algebra, dim)
    except (CliffordError, ScalarError, ValueError) as exc:
        raise ParseError(str(exc)) from None
