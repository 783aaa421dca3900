"""Exact coefficients: Gaussian rationals times Laurent monomials.

The coefficient ring is Q(i)[q, q^-1, hbar, params^{+-1}].  Every value is
immutable and kept in a canonical form, so ``==`` is structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

__all__ = [
    "ScalarError",
    "GaussianRational",
    "Monomial",
    "Scalar",
    "scalar_add",
    "scalar_mul",
    "scalar_limit_q1",
    "ONE",
    "ZERO",
    "I",
    "HBAR",
    "Q",
]

Number = Union[int, Fraction]


class ScalarError(ValueError):
    """Raised for an invalid coefficient (negative hbar power, division by zero)."""


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: GaussianRational) -> GaussianRational:
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def inverse(self) -> GaussianRational:
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ScalarError("division by zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def is_negative(self) -> bool:
        """Leading sign: the sign of the real part, or of the imaginary part if purely imaginary."""
        return self.re < 0 if self.re else self.im < 0


def _param_key(name: str) -> tuple:
    if name == "hbar":
        return (0, name)
    if name == "q":
        return (1, name)
    return (2, name)


@dataclass(frozen=True)
class Monomial:
    """A Laurent monomial, stored as sorted ``(parameter, exponent)`` pairs."""

    powers: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        for name, exp in self.powers:
            if exp == 0:
                raise ScalarError(f"zero exponent stored for {name!r}")
            if name == "hbar" and exp < 0:
                raise ScalarError("hbar cannot carry a negative exponent")

    @classmethod
    def of(cls, exponents: Mapping[str, int]) -> Monomial:
        items = sorted(((n, e) for n, e in exponents.items() if e), key=lambda t: _param_key(t[0]))
        return cls(tuple(items))

    def as_dict(self) -> dict[str, int]:
        return dict(self.powers)

    def __mul__(self, other: Monomial) -> Monomial:
        merged = self.as_dict()
        for name, exp in other.powers:
            merged[name] = merged.get(name, 0) + exp
        return Monomial.of(merged)

    def inverse(self) -> Monomial:
        return Monomial.of({n: -e for n, e in self.powers})

    def sort_key(self) -> tuple:
        return tuple((_param_key(n), e) for n, e in self.powers)

    def __str__(self) -> str:
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.powers)


_ONE_GR = GaussianRational(1)


class Scalar:
    """A finite sum of Gaussian-rational multiples of monomials."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, GaussianRational] | Iterable = ()) -> None:
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Monomial, GaussianRational] = {}
        for mono, coeff in terms:
            prev = acc.get(mono)
            acc[mono] = coeff if prev is None else prev + coeff
        self._terms = tuple(
            sorted(((m, c) for m, c in acc.items() if c), key=lambda t: t[0].sort_key())
        )
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, value: Number | GaussianRational) -> Scalar:
        if not isinstance(value, GaussianRational):
            value = GaussianRational(value)
        return cls([(Monomial(), value)])

    @classmethod
    def param(cls, name: str, exp: int = 1) -> Scalar:
        return cls([(Monomial.of({name: exp}), _ONE_GR)])

    @classmethod
    def coerce(cls, value: Scalar | Number) -> Scalar:
        return value if isinstance(value, Scalar) else cls.const(value)

    # -- structure ----------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[Monomial, GaussianRational], ...]:
        return self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    def params(self) -> set[str]:
        return {n for m, _ in self._terms for n, _ in m.powers}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return all(not m.powers for m, _ in self._terms)

    def constant_value(self) -> GaussianRational:
        if not self._terms:
            return GaussianRational()
        if not self.is_constant():
            raise ScalarError(f"{self} is not a constant")
        return self._terms[0][1]

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: Scalar | Number) -> Scalar:
        other = Scalar.coerce(other)
        return Scalar(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar([(m, -c) for m, c in self._terms])

    def __sub__(self, other: Scalar | Number) -> Scalar:
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: Number) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: Scalar | Number) -> Scalar:
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar.const(other)
            else:
                return NotImplemented
        return Scalar(
            [(m1 * m2, c1 * c2) for m1, c1 in self._terms for m2, c2 in other._terms]
        )

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if len(self._terms) != 1:
            raise ScalarError(f"cannot invert non-monomial scalar {self}")
        mono, coeff = self._terms[0]
        return Scalar([(mono.inverse(), coeff.inverse())])

    def __pow__(self, n: int) -> Scalar:
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    # -- substitution -------------------------------------------------
    def subs(self, name: str, value: Scalar) -> Scalar:
        """Replace parameter ``name`` by ``value``; negative powers need an invertible value."""
        return self.map_params(lambda n: value if n == name else None)

    def map_params(self, fn: Callable[[str], Scalar | None]) -> Scalar:
        """Substitute every parameter for which ``fn`` returns a Scalar."""
        out = ZERO
        changed = False
        for mono, coeff in self._terms:
            term = Scalar([(Monomial(), coeff)])
            keep: dict[str, int] = {}
            for name, exp in mono.powers:
                value = fn(name)
                if value is None:
                    keep[name] = exp
                    continue
                changed = True
                if exp < 0 and value.is_zero():
                    raise ScalarError(f"{name} is bound to 0 but appears with exponent {exp}")
                term = term * value**exp
            out = out + term * Scalar([(Monomial.of(keep), _ONE_GR)])
        return out if changed else self

    def limit_q1(self) -> Scalar:
        return self.subs("q", ONE)

    # -- text ---------------------------------------------------------
    def leading_negative(self) -> bool:
        return len(self._terms) == 1 and self._terms[0][1].is_negative()

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx, (mono, coeff) in enumerate(self._terms):
            neg = coeff.is_negative() and not (coeff.re and coeff.im)
            body = _render_term(-coeff if neg else coeff, mono)
            if idx == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)


def _render_fraction(value: Fraction, alone: bool) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    text = f"{value.numerator}/{value.denominator}"
    return text if alone else f"({text})"


def _render_term(coeff: GaussianRational, mono: Monomial) -> str:
    mono_text = str(mono)
    factors: list[str] = []
    if coeff.re and coeff.im:
        im = coeff.im
        sign = "-" if im < 0 else "+"
        im_abs = abs(im)
        im_text = "i" if im_abs == 1 else f"{_render_fraction(im_abs, False)}*i"
        factors.append(f"({_render_fraction(coeff.re, True)} {sign} {im_text})")
    elif coeff.im:
        if coeff.im != 1:
            factors.append(_render_fraction(coeff.im, False))
        factors.append("i")
    elif coeff.re != 1 or not mono_text:
        factors.append(_render_fraction(coeff.re, not mono_text))
    if mono_text:
        factors.append(mono_text)
    return "*".join(factors)


ZERO = Scalar()
ONE = Scalar.const(1)
I = Scalar.const(GaussianRational(0, 1))
HBAR = Scalar.param("hbar")
Q = Scalar.param("q")


def scalar_add(a: Scalar, b: Scalar) -> Scalar:
    return a + b


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    return a * b


def scalar_limit_q1(a: Scalar) -> Scalar:
    """Set ``q := 1``; all other parameters are left alone."""
    return a.limit_q1()
