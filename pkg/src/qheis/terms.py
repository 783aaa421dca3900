"""Operator words, degree-two tensor monomials and canonical expressions.

A monomial is ``coeff * blade * (slot1 ox slot2)``, or ``coeff * blade * slot1``
in tensor degree one.  Clifford factors commute with every operator symbol and
slide across ``ox``; they are collected into the blade prefix in the order they
are met (slot1 left to right, then slot2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional, Union

from .clifford import Blade, CliffordError, product_indices
from .scalars import ONE, ZERO, GaussianRational, Monomial, Scalar

__all__ = [
    "TensorDegreeError",
    "Gen",
    "Word",
    "TensorMonomial",
    "Expression",
    "canonicalize",
    "expr_add",
    "expr_scale",
    "expr_tensor",
    "expr_mul_word",
    "Atom",
    "Prod",
    "Tensor",
    "Sum",
    "Power",
]


class TensorDegreeError(ValueError):
    def __init__(self, message: str, pos: tuple[int, int] | None = None) -> None:
        super().__init__(message)
        self.pos = pos


# generator order: Coordinate < Momentum < Partial < FunSym < MatrixEntry
KINDS = (
    "coordinate",
    "momentum",
    "partial",
    "f",
    "f_comp",
    "df",
    "Df_left",
    "Df_right",
    "a",
    "b",
    "c",
    "d",
)
KIND_GROUP = {
    "coordinate": "coordinate",
    "momentum": "momentum",
    "partial": "partial",
    "f": "funsym",
    "f_comp": "funsym",
    "df": "funsym",
    "Df_left": "funsym",
    "Df_right": "funsym",
    "a": "entry",
    "b": "entry",
    "c": "entry",
    "d": "entry",
}
INDEXED = frozenset({"coordinate", "momentum", "partial", "f_comp", "df"})
_RANK = {k: i for i, k in enumerate(KINDS)}
KIND_TEXT = {"coordinate": "x", "momentum": "p", "partial": "d", "f_comp": "f", "df": "df",
              "f": "f", "Df_left": "Df", "Df_right": "fD", "a": "a", "b": "b", "c": "c", "d": "d"}


@dataclass(frozen=True)
class Gen:
    kind: str
    index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in _RANK:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind in INDEXED:
            if not isinstance(self.index, int) or self.index < 1:
                raise ValueError(f"{self.kind} needs an index >= 1, got {self.index!r}")
        elif self.index is not None:
            raise ValueError(f"{self.kind} takes no index")

    def sort_key(self) -> tuple[int, int]:
        return (_RANK[self.kind], self.index or 0)

    def __str__(self) -> str:
        if self.index is None:
            return KIND_TEXT[self.kind]
        return f"{KIND_TEXT[self.kind]}[{self.index}]"

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": self.index}

    @classmethod
    def from_json(cls, data: Mapping) -> Gen:
        return cls(data["kind"], data.get("index"))


def x(j: int) -> Gen:
    return Gen("coordinate", j)


def p(j: int) -> Gen:
    return Gen("momentum", j)


def dx(j: int) -> Gen:
    return Gen("partial", j)


Word = tuple  # tuple[Gen, ...]
# (algebra tag or "" for the unit, blade indices, slot1, slot2 or None)
Key = tuple


class TensorMonomial(NamedTuple):
    coeff: Scalar
    prefix: Blade
    slot1: tuple
    slot2: Optional[tuple]


def _word_key(word: tuple) -> tuple:
    return tuple(g.sort_key() for g in word)


def key_order(key: Key) -> tuple:
    alg, blade, s1, s2 = key
    return (alg, len(blade), blade, _word_key(s1), (0,) if s2 is None else (1, _word_key(s2)))


def prefix_product(k1: Key, k2: Key) -> tuple[int, str, tuple]:
    a1, b1 = k1[0], k1[1]
    a2, b2 = k2[0], k2[1]
    if not b1:
        return 1, a2, b2
    if not b2:
        return 1, a1, b1
    if a1 != a2:
        raise CliffordError("cannot mix A_m and B_p blades in one monomial")
    sign, idx = product_indices(a1, b1, b2)
    return sign, (a1 if idx else ""), idx


def _mul_keys(k1: Key, k2: Key) -> tuple[int, Key]:
    _, _, u1, v1 = k1
    _, _, u2, v2 = k2
    if v1 is None and v2 is None:
        slots = (u1 + u2, None)
    elif v2 is None and not u2:
        slots = (u1, v1)
    elif v1 is None and not u1:
        slots = (u2, v2)
    else:
        raise TensorDegreeError("product would exceed tensor degree 2")
    sign, alg, blade = prefix_product(k1, k2)
    return sign, (alg, blade) + slots


class Expression:
    """Canonical sum of tensor monomials; immutable, hashable, totally ordered terms."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, Scalar] | Iterable = ()) -> None:
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Key, Scalar] = {}
        for key, coeff in terms:
            prev = acc.get(key)
            acc[key] = coeff if prev is None else prev + coeff
        self._terms = tuple(sorted(((k, c) for k, c in acc.items() if c), key=lambda t: key_order(t[0])))
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def scalar(cls, s: Scalar | int) -> Expression:
        return cls([(("", (), (), None), Scalar.coerce(s))])

    @classmethod
    def gen(cls, g: Gen) -> Expression:
        return cls([(("", (), (g,), None), ONE)])

    @classmethod
    def word(cls, gens: Iterable[Gen], coeff: Scalar | int = 1) -> Expression:
        return cls([(("", (), tuple(gens), None), Scalar.coerce(coeff))])

    @classmethod
    def blade(cls, blade: Blade) -> Expression:
        alg = blade.algebra if blade.indices else ""
        return cls([((alg, blade.indices, (), None), ONE)])

    @classmethod
    def tensor_of(cls, left: Iterable[Gen], right: Iterable[Gen], coeff: Scalar | int = 1) -> Expression:
        return cls([(("", (), tuple(left), tuple(right)), Scalar.coerce(coeff))])

    # -- structure ----------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[Key, Scalar], ...]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[Key, Scalar]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def monomials(self) -> list[TensorMonomial]:
        return [
            TensorMonomial(c, Blade(blade, alg or "A"), s1, s2) for (alg, blade, s1, s2), c in self._terms
        ]

    @property
    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(1 if k[3] is None else 2 for k, _ in self._terms)

    def coefficient(self, key: Key) -> Scalar:
        return dict(self._terms).get(key, ZERO)

    def is_scalar(self) -> bool:
        return all(k == ("", (), (), None) for k, _ in self._terms)

    def as_scalar(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError(f"{self} is not a pure scalar")
        return self._terms[0][1] if self._terms else ZERO

    def generators(self) -> set[Gen]:
        out = set()
        for (_, _, s1, s2), _ in self._terms:
            out.update(s1)
            out.update(s2 or ())
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Expression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: Expression) -> Expression:
        if not isinstance(other, Expression):
            return NotImplemented
        return Expression(self._terms + other._terms)

    def __neg__(self) -> Expression:
        return Expression([(k, -c) for k, c in self._terms])

    def __sub__(self, other: Expression) -> Expression:
        if not isinstance(other, Expression):
            return NotImplemented
        return self + (-other)

    def scale(self, s: Scalar | int | Fraction) -> Expression:
        s = Scalar.coerce(s)
        if not s:
            return Expression()
        return Expression([(k, s * c) for k, c in self._terms])

    def __mul__(self, other: Expression | Scalar | int) -> Expression:
        if not isinstance(other, Expression):
            if isinstance(other, (Scalar, int, Fraction)):
                return self.scale(other)
            return NotImplemented
        out = []
        for k1, c1 in self._terms:
            for k2, c2 in other._terms:
                sign, key = _mul_keys(k1, k2)
                if sign:
                    out.append((key, c1 * c2 * sign))
        return Expression(out)

    def __rmul__(self, other: Scalar | int) -> Expression:
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def tensor(self, other: Expression) -> Expression:
        if self.degree > 1 or other.degree > 1:
            raise TensorDegreeError("tensor product needs two degree-one expressions")
        out = []
        for (a1, b1, u, _), c1 in self._terms:
            for (a2, b2, v, _), c2 in other._terms:
                sign, alg, blade = prefix_product((a1, b1), (a2, b2))
                if sign:
                    out.append(((alg, blade, u, v), c1 * c2 * sign))
        return Expression(out)

    def map_scalars(self, fn: Callable[[Scalar], Scalar]) -> Expression:
        return Expression([(k, fn(c)) for k, c in self._terms])

    def limit_q1(self) -> Expression:
        return self.map_scalars(Scalar.limit_q1)

    def substitute(self, mapping: Mapping[Gen, Expression]) -> Expression:
        """Replace generators by degree-one expressions, re-extracting any blades they carry."""
        if not mapping or not (self.generators() & mapping.keys()):
            return self
        for g, value in mapping.items():
            if value.degree > 1:
                raise TensorDegreeError(f"substitute for {g} must have tensor degree 1")
        out = Expression()

        def slot_expr(word: tuple) -> Expression:
            acc = Expression.scalar(1)
            for g in word:
                acc = acc * (mapping[g] if g in mapping else Expression.gen(g))
            return acc

        for (alg, blade, s1, s2), c in self._terms:
            head = Expression([((alg, blade, (), None), c)])
            if s2 is None:
                out = out + head * slot_expr(s1)
            else:
                out = out + head * slot_expr(s1).tensor(slot_expr(s2))
        return out

    # -- text ---------------------------------------------------------
    def __repr__(self) -> str:
        return f"Expression({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, coeff in self._terms:
            body = _render_body(key)
            neg = coeff.leading_negative()
            c = -coeff if neg else coeff
            if c == ONE:
                text = body
            elif body == "1":
                text = str(c) if c.is_monomial() else f"({c})"
            else:
                ctext = str(c) if c.is_monomial() else f"({c})"
                text = f"{ctext} * ({body})" if " " in body else f"{ctext} * {body}"
            if not parts:
                parts.append(f"-{text}" if neg else text)
            else:
                parts.append(f" - {text}" if neg else f" + {text}")
        return "".join(parts)

    def to_json(self) -> list:
        out = []
        for (alg, blade, s1, s2), coeff in self._terms:
            out.append(
                {
                    "coeff": scalar_to_json(coeff),
                    "algebra": alg or None,
                    "blade": list(blade),
                    "slot1": [g.to_json() for g in s1],
                    "slot2": None if s2 is None else [g.to_json() for g in s2],
                }
            )
        return out

    @classmethod
    def from_json(cls, data: list) -> Expression:
        terms = []
        for item in data:
            s2 = item["slot2"]
            key = (
                item.get("algebra") or "",
                tuple(item["blade"]),
                tuple(Gen.from_json(g) for g in item["slot1"]),
                None if s2 is None else tuple(Gen.from_json(g) for g in s2),
            )
            terms.append((key, scalar_from_json(item["coeff"])))
        return cls(terms)


def _blade_text(alg: str, blade: tuple) -> str:
    inner = ",".join(map(str, blade))
    return f"E[{inner}]" if alg == "A" else f"be[{inner}]"


def _render_body(key: Key) -> str:
    alg, blade, s1, s2 = key
    left = ([_blade_text(alg, blade)] if blade else []) + [str(g) for g in s1]
    left_text = " ".join(left) or "1"
    if s2 is None:
        return left_text
    right_text = " ".join(str(g) for g in s2) or "1"
    return f"{left_text} ox {right_text}"


def scalar_to_json(s: Scalar) -> list:
    return [
        {
            "num": [c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator],
            "pow": dict(m.powers),
        }
        for m, c in s.terms
    ]


def scalar_from_json(data: list) -> Scalar:
    terms = []
    for item in data:
        rn, rd, im_n, im_d = item["num"]
        terms.append((Monomial.of(item["pow"]), GaussianRational(Fraction(rn, rd), Fraction(im_n, im_d))))
    return Scalar(terms)


# -- raw term trees ---------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    value: Union[Gen, Blade, Scalar]
    pos: tuple[int, int] | None = None


@dataclass(frozen=True)
class Prod:
    factors: tuple
    pos: tuple[int, int] | None = None


@dataclass(frozen=True)
class Tensor:
    left: object
    right: object
    pos: tuple[int, int] | None = None


@dataclass(frozen=True)
class Sum:
    items: tuple  # of (sign, node)
    pos: tuple[int, int] | None = None


@dataclass(frozen=True)
class Power:
    base: object
    exp: int
    pos: tuple[int, int] | None = None


def _branch_algebras(node) -> set[str]:
    """Clifford algebras met along one multiplicative branch (sums are not crossed)."""
    if isinstance(node, Atom):
        if isinstance(node.value, Blade) and node.value.indices:
            return {node.value.algebra}
        return set()
    if isinstance(node, Prod):
        return set().union(*(_branch_algebras(f) for f in node.factors))
    if isinstance(node, Tensor):
        return _branch_algebras(node.left) | _branch_algebras(node.right)
    if isinstance(node, Power):
        return _branch_algebras(node.base)
    return set()


def canonicalize(node) -> Expression:
    """Evaluate a raw term tree into its canonical Expression."""
    if isinstance(node, Expression):
        return node
    if isinstance(node, Atom):
        v = node.value
        if isinstance(v, Gen):
            return Expression.gen(v)
        if isinstance(v, Blade):
            return Expression.blade(v)
        return Expression.scalar(v)
    if isinstance(node, Sum):
        out = Expression()
        for sign, item in node.items:
            term = canonicalize(item)
            out = out + (term if sign > 0 else -term)
        return out
    if isinstance(node, (Prod, Tensor)):
        if len(_branch_algebras(node)) > 1:
            raise CliffordError("cannot mix A_m and B_p blades in one monomial")
    if isinstance(node, Prod):
        out = Expression.scalar(1)
        for f in node.factors:
            try:
                out = out * canonicalize(f)
            except TensorDegreeError as exc:
                raise TensorDegreeError(str(exc), exc.pos or getattr(f, "pos", None) or node.pos) from None
        return out
    if isinstance(node, Tensor):
        left, right = canonicalize(node.left), canonicalize(node.right)
        if left.degree > 1 or right.degree > 1:
            raise TensorDegreeError("nested tensor product exceeds degree 2", node.pos)
        return left.tensor(right)
    if isinstance(node, Power):
        base = canonicalize(node.base)
        if node.exp < 0:
            if not base.is_scalar():
                raise ValueError("negative powers are only defined for scalars")
            return Expression.scalar(base.as_scalar() ** node.exp)
        out = Expression.scalar(1)
        for _ in range(node.exp):
            out = out * base
        return out
    raise TypeError(f"not a term tree node: {node!r}")


def expr_add(a: Expression, b: Expression) -> Expression:
    return a + b


def expr_scale(s: Scalar, a: Expression) -> Expression:
    return a.scale(s)


def expr_tensor(a: Expression, b: Expression) -> Expression:
    return a.tensor(b)


def expr_mul_word(a: Expression, b: Expression) -> Expression:
    if a.degree > 1 or b.degree > 1:
        raise TensorDegreeError("word product needs degree-one expressions")
    return a * b
