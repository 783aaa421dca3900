"""Clifford algebra A_m (e_a e_b + e_b e_a = -2 delta_ab) and the deformed algebra B_p.

In B_p the two defining relations, with q_jk = -1 off the diagonal and 0 on
it, force ``e_j e_j = 1`` and ``e_j e_k = 0`` for ``j != k``.  The algebra is
therefore spanned by the unit and the generators; blades of grade >= 2 do not
exist.  Each vanishing product is reported on the ``qheis.clifford`` logger.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .scalars import ONE, ZERO, Scalar

__all__ = [
    "CliffordError",
    "Blade",
    "Multivector",
    "blade_product",
    "mv_add",
    "mv_mul",
    "all_blades",
]

logger = logging.getLogger(__name__)

ALGEBRAS = ("A", "B")


class CliffordError(ValueError):
    pass


@dataclass(frozen=True)
class Blade:
    """A basis blade: strictly increasing generator indices (empty = unit)."""

    indices: tuple[int, ...] = ()
    algebra: str = "A"
    dim: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(self.indices))
        if self.algebra not in ALGEBRAS:
            raise CliffordError(f"unknown algebra {self.algebra!r}")
        idx = self.indices
        if any(i < 1 for i in idx):
            raise CliffordError(f"blade indices must be >= 1, got {idx}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise CliffordError(f"blade indices must be strictly increasing, got {idx}")
        if self.dim is not None and idx and idx[-1] > self.dim:
            raise CliffordError(f"blade index {idx[-1]} exceeds dimension {self.dim}")
        if self.algebra == "B" and len(idx) > 1:
            raise CliffordError("B_p has no blades of grade >= 2 (every such product is 0)")

    @property
    def grade(self) -> int:
        return len(self.indices)

    def is_unit(self) -> bool:
        return not self.indices

    def sort_key(self) -> tuple:
        return (len(self.indices), self.indices)

    def __str__(self) -> str:
        if not self.indices:
            return "1"
        inner = ",".join(map(str, self.indices))
        return f"E[{inner}]" if self.algebra == "A" else f"be[{inner}]"


def product_indices(algebra: str, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and canonical indices of the blade product ``a * b``; sign 0 means the product vanishes."""
    if algebra == "B":
        if not a:
            return 1, b
        if not b:
            return 1, a
        (j,), (k,) = a, b
        if j == k:
            return 1, ()
        logger.info("degenerate B_p product: be[%d]*be[%d] = 0", j, k)
        return 0, ()
    # merge-sort transposition count: each pair (x in a, y in b) with x > y costs one swap
    swaps = 0
    for x in a:
        for y in b:
            if x > y:
                swaps += 1
    common = set(a) & set(b)
    sign = -1 if (swaps + len(common)) % 2 else 1
    return sign, tuple(sorted(set(a) ^ set(b)))


def blade_product(a: Blade, b: Blade) -> tuple[Scalar, Blade]:
    if a.algebra != b.algebra or a.dim != b.dim:
        raise CliffordError(f"cannot multiply blades of {a.algebra}{a.dim} and {b.algebra}{b.dim}")
    sign, idx = product_indices(a.algebra, a.indices, b.indices)
    return Scalar.const(sign), Blade(idx, a.algebra, a.dim)


def all_blades(algebra: str, dim: int) -> list[Blade]:
    if algebra == "B":
        return [Blade((), "B", dim)] + [Blade((j,), "B", dim) for j in range(1, dim + 1)]
    return [
        Blade(combo, "A", dim)
        for grade in range(dim + 1)
        for combo in itertools.combinations(range(1, dim + 1), grade)
    ]


class Multivector:
    """Blade-indexed combination of Scalars in A_m or B_p."""

    __slots__ = ("algebra", "dim", "_terms", "_hash")

    def __init__(self, terms: Mapping[Blade, Scalar] | Iterable = (), algebra: str = "A", dim: int | None = None) -> None:
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Blade, Scalar] = {}
        for blade, coeff in terms:
            if blade.algebra != algebra or blade.dim != dim:
                raise CliffordError(f"blade {blade} does not belong to {algebra}{dim}")
            acc[blade] = acc.get(blade, ZERO) + coeff
        self.algebra = algebra
        self.dim = dim
        self._terms = tuple(sorted(((b, c) for b, c in acc.items() if c), key=lambda t: t[0].sort_key()))
        self._hash = None

    @classmethod
    def scalar(cls, value: Scalar | int, algebra: str = "A", dim: int | None = None) -> Multivector:
        return cls([(Blade((), algebra, dim), Scalar.coerce(value))], algebra, dim)

    @classmethod
    def blade(cls, indices: Iterable[int], algebra: str = "A", dim: int | None = None,
              coeff: Scalar | int = 1) -> Multivector:
        return cls([(Blade(tuple(indices), algebra, dim), Scalar.coerce(coeff))], algebra, dim)

    @property
    def terms(self) -> tuple[tuple[Blade, Scalar], ...]:
        return self._terms

    def __iter__(self) -> Iterator[tuple[Blade, Scalar]]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, blade: Blade) -> Scalar:
        return dict(self._terms).get(blade, ZERO)

    def _check(self, other: Multivector) -> None:
        if self.algebra != other.algebra or self.dim != other.dim:
            raise CliffordError(
                f"mismatched algebras {self.algebra}{self.dim} and {other.algebra}{other.dim}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return (self.algebra, self.dim, self._terms) == (other.algebra, other.dim, other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.algebra, self.dim, self._terms))
        return self._hash

    def __add__(self, other: Multivector) -> Multivector:
        self._check(other)
        return Multivector(self._terms + other._terms, self.algebra, self.dim)

    def __neg__(self) -> Multivector:
        return Multivector([(b, -c) for b, c in self._terms], self.algebra, self.dim)

    def __sub__(self, other: Multivector) -> Multivector:
        return self + (-other)

    def scale(self, s: Scalar | int) -> Multivector:
        s = Scalar.coerce(s)
        return Multivector([(b, s * c) for b, c in self._terms], self.algebra, self.dim)

    def __mul__(self, other: Multivector | Scalar | int) -> Multivector:
        if not isinstance(other, Multivector):
            if isinstance(other, (Scalar, int, Fraction)):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        out = []
        for b1, c1 in self._terms:
            for b2, c2 in other._terms:
                sign, idx = product_indices(self.algebra, b1.indices, b2.indices)
                if sign:
                    out.append((Blade(idx, self.algebra, self.dim), c1 * c2 * sign))
        return Multivector(out, self.algebra, self.dim)

    def __rmul__(self, other: Scalar | int) -> Multivector:
        return self.scale(other)

    def map_scalars(self, fn) -> Multivector:
        return Multivector([(b, fn(c)) for b, c in self._terms], self.algebra, self.dim)

    def __repr__(self) -> str:
        return f"Multivector({str(self)!r}, {self.algebra}{self.dim})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for blade, coeff in self._terms:
            if blade.is_unit():
                text, neg = (str(-coeff), True) if coeff.leading_negative() else (str(coeff), False)
                if not coeff.is_monomial():
                    text = f"({text})"
            else:
                neg = coeff.leading_negative()
                c = -coeff if neg else coeff
                if c == ONE:
                    text = str(blade)
                elif c.is_monomial():
                    text = f"{c}*{blade}"
                else:
                    text = f"({c})*{blade}"
            if not parts:
                parts.append(f"-{text}" if neg else text)
            else:
                parts.append(f" - {text}" if neg else f" + {text}")
        return "".join(parts)


def mv_add(a: Multivector, b: Multivector) -> Multivector:
    return a + b


def mv_mul(a: Multivector, b: Multivector) -> Multivector:
    return a * b
