"""Clifford-valued polynomials in x0..xm and the operators acting on them.

Left Dirac:        D f  = sum_{b=1..m} e_b * (d f / d x_b)
Right Dirac:       f D  = sum_{b=1..m} (d f / d x_b) * e_b
Cauchy-Riemann:    d f / d x0 + D f
Difference (B_p):  e_j * (d f / d x_k) + e_k * (d f / d x_j)
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

from .clifford import CliffordError, Multivector
from .scalars import Scalar
from .terms import Expression, Gen, scalar_to_json

__all__ = [
    "CalculusError",
    "PolyFunction",
    "partial",
    "dirac",
    "cauchy_riemann",
    "difference_op",
    "is_monogenic",
    "laplacian",
]

SIDES = ("left", "right")


class CalculusError(ValueError):
    pass


class PolyFunction:
    """Polynomial in x0..x_dim with Multivector coefficients."""

    __slots__ = ("algebra", "dim", "_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Multivector] | Iterable = (), algebra: str = "A", dim: int = 1) -> None:
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[tuple, Multivector] = {}
        for exps, mv in terms:
            exps = tuple(exps)
            if len(exps) != dim + 1 or any(e < 0 for e in exps):
                raise CalculusError(f"exponent vector {exps} invalid for dimension {dim}")
            if mv.algebra != algebra or mv.dim != dim:
                raise CliffordError(f"coefficient in {mv.algebra}{mv.dim}, expected {algebra}{dim}")
            acc[exps] = acc[exps] + mv if exps in acc else mv
        self.algebra = algebra
        self.dim = dim
        self._terms = tuple(sorted(((e, mv) for e, mv in acc.items() if mv), key=lambda t: t[0]))
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, mv: Multivector) -> PolyFunction:
        return cls([((0,) * (mv.dim + 1), mv)], mv.algebra, mv.dim)

    @classmethod
    def coordinate(cls, j: int, dim: int, algebra: str = "A") -> PolyFunction:
        if not 0 <= j <= dim:
            raise CalculusError(f"coordinate x{j} out of range 0..{dim}")
        exps = [0] * (dim + 1)
        exps[j] = 1
        return cls([(tuple(exps), Multivector.scalar(1, algebra, dim))], algebra, dim)

    @classmethod
    def zero(cls, dim: int, algebra: str = "A") -> PolyFunction:
        return cls((), algebra, dim)

    def blade(self, indices: Iterable[int]) -> Multivector:
        return Multivector.blade(indices, self.algebra, self.dim)

    # -- structure ----------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[tuple, Multivector], ...]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[tuple, Multivector]]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e, _ in self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyFunction):
            return NotImplemented
        return (self.algebra, self.dim, self._terms) == (other.algebra, other.dim, other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.algebra, self.dim, self._terms))
        return self._hash

    def _check(self, other: PolyFunction) -> None:
        if (self.algebra, self.dim) != (other.algebra, other.dim):
            raise CliffordError("polynomials live in different algebras")

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: PolyFunction) -> PolyFunction:
        self._check(other)
        return PolyFunction(self._terms + other._terms, self.algebra, self.dim)

    def __neg__(self) -> PolyFunction:
        return PolyFunction([(e, -mv) for e, mv in self._terms], self.algebra, self.dim)

    def __sub__(self, other: PolyFunction) -> PolyFunction:
        return self + (-other)

    def scale(self, s: Scalar | int) -> PolyFunction:
        return PolyFunction([(e, mv.scale(s)) for e, mv in self._terms], self.algebra, self.dim)

    def __mul__(self, other: PolyFunction | Multivector | Scalar | int) -> PolyFunction:
        if isinstance(other, Multivector):
            return PolyFunction([(e, mv * other) for e, mv in self._terms], self.algebra, self.dim)
        if not isinstance(other, PolyFunction):
            return self.scale(other)
        self._check(other)
        out = []
        for e1, m1 in self._terms:
            for e2, m2 in other._terms:
                out.append((tuple(a + b for a, b in zip(e1, e2)), m1 * m2))
        return PolyFunction(out, self.algebra, self.dim)

    def __rmul__(self, other: Multivector | Scalar | int) -> PolyFunction:
        if isinstance(other, Multivector):
            return PolyFunction([(e, other * mv) for e, mv in self._terms], self.algebra, self.dim)
        return self.scale(other)

    # -- text ---------------------------------------------------------
    def __repr__(self) -> str:
        return f"PolyFunction({str(self)!r}, {self.algebra}{self.dim})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, mv in self._terms:
            xs = [f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e]
            for blade, coeff in mv:
                neg = coeff.leading_negative()
                c = -coeff if neg else coeff
                factors = []
                if c != 1 or (not xs and blade.is_unit()):
                    factors.append(str(c) if c.is_monomial() else f"({c})")
                factors += xs
                if not blade.is_unit():
                    factors.append(str(blade))
                text = "*".join(factors)
                if not parts:
                    parts.append(f"-{text}" if neg else text)
                else:
                    parts.append(f" - {text}" if neg else f" + {text}")
        return "".join(parts)

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "dim": self.dim,
            "terms": [
                {"exponents": list(exps), "blade": list(blade.indices), "coeff": scalar_to_json(coeff)}
                for exps, mv in self._terms
                for blade, coeff in mv
            ],
        }

    def to_expression(self) -> Expression:
        """Embed into the term algebra: x_i becomes the coordinate generator x[i], blades become the prefix.

        Only coordinates x1..xm are representable; a term depending on x0 raises.
        """
        out = Expression()
        for exps, mv in self._terms:
            if exps[0]:
                raise CalculusError("x0 has no counterpart among the operator generators")
            word = tuple(Gen("coordinate", i) for i, e in enumerate(exps) if i for _ in range(e))
            w = Expression.word(word)
            for blade, coeff in mv:
                out = out + (Expression.blade(blade) * w).scale(coeff)
        return out


def partial(f: PolyFunction, j: int) -> PolyFunction:
    if not 0 <= j <= f.dim:
        raise CalculusError(f"coordinate index {j} out of range 0..{f.dim}")
    out = []
    for exps, mv in f:
        e = exps[j]
        if e:
            new = list(exps)
            new[j] = e - 1
            out.append((tuple(new), mv.scale(e)))
    return PolyFunction(out, f.algebra, f.dim)


def _require_a(f: PolyFunction, what: str) -> None:
    if f.algebra != "A":
        raise CliffordError(f"the {what} is defined over A_m, not {f.algebra}_{f.dim}")


def dirac(f: PolyFunction, side: str = "left") -> PolyFunction:
    _require_a(f, "Dirac operator")
    if side not in SIDES:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    out = PolyFunction.zero(f.dim, f.algebra)
    for beta in range(1, f.dim + 1):
        e = f.blade((beta,))
        d = partial(f, beta)
        out = out + (e * d if side == "left" else d * e)
    return out


def cauchy_riemann(f: PolyFunction) -> PolyFunction:
    _require_a(f, "Cauchy-Riemann operator")
    return partial(f, 0) + dirac(f, "left")


def difference_op(f: PolyFunction, j: int, k: int) -> PolyFunction:
    if f.algebra != "B":
        raise CliffordError("the difference operator acts with B_p coefficients")
    if j == k:
        raise CalculusError("the difference operator needs j != k")
    for idx in (j, k):
        if not 1 <= idx <= f.dim:
            raise CalculusError(f"index {idx} out of range 1..{f.dim}")
    return f.blade((j,)) * partial(f, k) + f.blade((k,)) * partial(f, j)


def is_monogenic(f: PolyFunction, side: str = "left") -> tuple[bool, PolyFunction]:
    witness = dirac(f, side)
    return witness.is_zero(), witness


def laplacian(f: PolyFunction) -> PolyFunction:
    """Sum of second partials over x1..xm (x0 excluded)."""
    out = PolyFunction.zero(f.dim, f.algebra)
    for beta in range(1, f.dim + 1):
        out = out + partial(partial(f, beta), beta)
    return out
