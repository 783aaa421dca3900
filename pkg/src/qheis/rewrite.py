"""Directed rewriting of tensor expressions under named relation presets.

A rule rewrites a pair of generators, either adjacent inside one slot word
(``x[j] x[k]``) or straddling the tensor sign (``x[j] ox p[k]``: last factor
of slot1, first factor of slot2).  The right-hand side is DSL text that is
re-parsed for each concrete index assignment, so ``delta[j,k]`` resolves to
0 or 1 before any arithmetic happens.

Presentation file format, one item per line::

    # comment
    name qheis2
    param Q[j,k] = q
    symbol f = f[1]
    x[j] ox p[k] | any -> q * (p[k] ox x[j]) + i*hbar*delta[j,k]
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Sequence

from .parser import ParseError, PatternGen, parse_expression, parse_pattern, parse_scalar
from .scalars import Scalar
from .terms import KIND_GROUP, KINDS, Expression, Gen

__all__ = [
    "RewriteError",
    "BudgetExceeded",
    "RewriteRule",
    "Presentation",
    "CriticalPair",
    "DEFAULT_BUDGET",
    "PRESETS",
    "preset",
    "load_presentation",
    "parse_presentation",
    "normalize",
    "check_identity",
    "critical_pairs",
    "termination_witness",
    "rule_instances",
]

DEFAULT_BUDGET = 10**6


class RewriteError(ValueError):
    pass


class BudgetExceeded(RewriteError):
    """The rule set did not reach a normal form within the application budget."""


_COND = re.compile(r"^\s*(?:(any)|(\w+)\s*(<|>|=|!=)\s*(\w+))\s*$")


@dataclass(frozen=True)
class RewriteRule:
    left: PatternGen
    right: PatternGen
    cross: bool
    condition: str = "any"
    rhs: str = "0"
    label: str = ""

    def __post_init__(self) -> None:
        m = _COND.match(self.condition)
        if not m:
            raise RewriteError(f"bad index condition {self.condition!r}")
        if not m.group(1):
            names = set(self.variables())
            for side in (m.group(2), m.group(4)):
                if not side.isdigit() and side not in names:
                    raise RewriteError(f"condition uses unbound variable {side!r}")

    @classmethod
    def parse(cls, line: str, label: str = "") -> RewriteRule:
        if "->" not in line:
            raise ParseError(f"rule needs '->': {line!r}")
        lhs, rhs = line.split("->", 1)
        cond = "any"
        if "|" in lhs:
            lhs, cond = lhs.split("|", 1)
        left, right, cross = parse_pattern(lhs)
        return cls(left, right, cross, cond.strip(), rhs.strip(), label or lhs.strip())

    def variables(self) -> tuple[str, ...]:
        out = []
        for pg in (self.left, self.right):
            if isinstance(pg.index, str) and pg.index not in out:
                out.append(pg.index)
        return tuple(out)

    def match(self, g1: Gen, g2: Gen) -> Optional[dict[str, int]]:
        env: dict[str, int] = {}
        for pg, g in ((self.left, g1), (self.right, g2)):
            if pg.kind != g.kind:
                return None
            if isinstance(pg.index, str):
                if env.setdefault(pg.index, g.index) != g.index:
                    return None
            elif pg.index != g.index:
                return None
        return env if self._condition_holds(env) else None

    def _condition_holds(self, env: dict[str, int]) -> bool:
        m = _COND.match(self.condition)
        if m.group(1):
            return True
        a, op, b = m.group(2), m.group(3), m.group(4)
        va = int(a) if a.isdigit() else env[a]
        vb = int(b) if b.isdigit() else env[b]
        return {"<": va < vb, ">": va > vb, "=": va == vb, "!=": va != vb}[op]

    def __str__(self) -> str:
        sep = " ox " if self.cross else " "
        return f"{self.left}{sep}{self.right} | {self.condition} -> {self.rhs}"


_PARAM_PATTERN = re.compile(r"^(\w+)(?:\[(\w+),(\w+)\])?$")


@dataclass(frozen=True, eq=False)
class Presentation:
    """An immutable, ordered rule list plus parameter and symbol bindings."""

    name: str
    rules: tuple[RewriteRule, ...]
    params: tuple[tuple[str, str], ...] = ()
    symbols: tuple[tuple[Gen, Expression], ...] = ()
    q_limit: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- derived presentations ---------------------------------------
    def with_params(self, *bindings: tuple[str, str], name: str | None = None) -> Presentation:
        return replace(self, name=name or self.name, params=tuple(bindings) + self.params, _cache={})

    def with_symbols(self, mapping: dict[Gen, Expression], name: str | None = None) -> Presentation:
        return replace(self, name=name or self.name, symbols=self.symbols + tuple(mapping.items()), _cache={})

    def with_rules(self, rules: Sequence[RewriteRule], name: str | None = None) -> Presentation:
        return replace(self, name=name or self.name, rules=self.rules + tuple(rules), _cache={})

    def limit_q1(self) -> Presentation:
        return replace(self, name=f"{self.name}@q=1", q_limit=True, _cache={})

    # -- bindings -----------------------------------------------------
    def _param_value(self, name: str) -> Optional[Scalar]:
        m = re.match(r"^(\w+)\[(\d+),(\d+)\]$", name)
        for pattern, value in self.params:
            pm = _PARAM_PATTERN.match(pattern)
            if not pm:
                raise RewriteError(f"bad parameter pattern {pattern!r}")
            base, v1, v2 = pm.groups()
            if v1 is None:
                if base == name:
                    return parse_scalar(value)
                continue
            if not m or m.group(1) != base:
                continue
            env: dict[str, int] = {}
            ok = True
            for var, actual in ((v1, int(m.group(2))), (v2, int(m.group(3)))):
                if var.isdigit():
                    ok = ok and int(var) == actual
                elif env.setdefault(var, actual) != actual:
                    ok = False
            if ok:
                return parse_scalar(value, env)
        return None

    def transform(self, expr: Expression) -> Expression:
        """Apply parameter bindings, symbol substitutions and the q=1 limit."""
        if self.params:
            expr = expr.map_scalars(lambda s: s.map_params(self._param_value))
        if self.symbols:
            expr = expr.substitute(dict(self.symbols))
            if self.params:
                expr = expr.map_scalars(lambda s: s.map_params(self._param_value))
        if self.q_limit:
            expr = expr.limit_q1()
        return expr

    def instantiate(self, index: int, env: dict[str, int]) -> tuple[tuple[tuple, Optional[tuple], Scalar], ...]:
        """Right-hand side of rule ``index`` at ``env`` as (slot1, slot2, coeff) pieces."""
        ckey = (index, tuple(sorted(env.items())))
        hit = self._cache.get(ckey)
        if hit is not None:
            return hit
        rule = self.rules[index]
        expr = self.transform(parse_expression(rule.rhs, env))
        pieces = []
        for (alg, blade, s1, s2), coeff in expr:
            if blade:
                raise RewriteError(f"rule {rule} has a Clifford factor on its right-hand side")
            if s2 is not None and not rule.cross:
                raise RewriteError(f"word rule {rule} cannot produce a tensor")
            pieces.append((s1, s2, coeff))
        out = tuple(pieces)
        self._cache[ckey] = out
        return out

    def to_text(self) -> str:
        lines = [f"name {self.name}"]
        lines += [f"param {p} = {v}" for p, v in self.params]
        lines += [f"symbol {g} = {e}" for g, e in self.symbols]
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


def parse_presentation(text: str, name: str = "custom") -> Presentation:
    rules, params, symbols = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("name "):
                name = line[5:].strip()
            elif line.startswith("param "):
                lhs, _, rhs = line[6:].partition("=")
                if not _PARAM_PATTERN.match(lhs.strip()) or not rhs.strip():
                    raise ParseError(f"bad param line {raw!r}")
                value = rhs.strip()
                if value == "table":
                    value = "delta[j,k] - 1" if "[" in lhs else value
                params.append((lhs.strip(), value))
            elif line.startswith("symbol "):
                lhs, _, rhs = line[7:].partition("=")
                target = parse_expression(lhs.strip())
                (key, _), = target.terms
                if len(key[2]) != 1 or key[3] is not None:
                    raise ParseError(f"symbol line must bind a single generator: {raw!r}")
                symbols[key[2][0]] = parse_expression(rhs.strip())
            else:
                rules.append(RewriteRule.parse(line))
        except ParseError as exc:
            raise ParseError(exc.message, lineno, exc.column, exc.token) from None
        except RewriteError as exc:
            raise ParseError(str(exc), lineno, 1) from None
    return Presentation(name, tuple(rules), tuple(params), tuple(symbols.items()))


# -- presets ----------------------------------------------------------------

def _qheis_f_text(sign: str = "as-printed", deformation: str = "q") -> str:
    # deformation "Q" writes every q of the position and momentum rules as the pair parameter Q[j,k]
    c = "q" if deformation == "q" else "Q[j,k]"
    s = "-" if sign == "as-printed" else "+"
    return (
        f"x[j] ox x[k] | j<k -> {c}^-1 * (x[k] ox x[j])\n"
        f"x[j] ox p[k] | any -> Q[j,k] * (p[k] ox x[j]) {s} i*hbar*delta[j,k] * f\n"
        f"p[j] ox p[k] | j<k -> {c}^-1 * (p[k] ox p[j]) - i*hbar * (df[j] ox p[k])"
        f" + i*hbar*{c}^-1 * (df[k] ox p[j])\n"
    )


PRESETS: dict[str, str] = {
    "manin-word": "x[j] x[k] | j<k -> q * (x[k] x[j])\n",
    "qplane": "x[k] ox x[j] | j<k -> q * (x[j] ox x[k])\n",
    "dual-plane": "d[j] ox d[k] | j<k -> q^-1 * (d[k] ox d[j])\n",
    "qheis2": (
        "x[j] ox x[k] | j<k -> q^-1 * (x[k] ox x[j])\n"
        "p[j] ox p[k] | j<k -> q^-1 * (p[k] ox p[j])\n"
        "x[j] ox p[k] | any -> q * (p[k] ox x[j]) + i*hbar*delta[j,k]\n"
    ),
    "qheis-f": _qheis_f_text("as-printed"),
    "qheis-f-unified": _qheis_f_text("unified"),
    "qheis-fjk": _qheis_f_text("as-printed", "Q"),
    "classical": (
        "x[j] x[k] | j>k -> x[k] x[j]\n"
        "p[k] x[j] | any -> x[j] p[k] - i*hbar*delta[j,k] * f\n"
        "p[j] p[k] | j>k -> p[k] p[j] - i*hbar * (df[j] p[k] - df[k] p[j])\n"
    ),
    "commuting-entries": (
        "b a -> a b\n"
        "c a -> a c\n"
        "d a -> a d\n"
        "c b -> b c\n"
        "d b -> b d\n"
        "d c -> c d\n"
    ),
}

QJK_BINDINGS = ("q", "table", "symbolic")


def preset(name: str, qjk: str = "symbolic") -> Presentation:
    """A built-in presentation; ``qjk`` binds the pair parameters Q[j,k]."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    pres = parse_presentation(PRESETS[name], name)
    return bind_qjk(pres, qjk)


def bind_qjk(pres: Presentation, qjk: str) -> Presentation:
    if qjk == "symbolic":
        return pres
    if qjk == "q":
        return pres.with_params(("Q[j,k]", "q"))
    if qjk == "table":
        return pres.with_params(("Q[j,k]", "delta[j,k] - 1"))
    raise ValueError(f"qjk binding must be one of {QJK_BINDINGS}, got {qjk!r}")


def load_presentation(name_or_path: str, qjk: str = "symbolic") -> Presentation:
    """Resolve against the built-in catalog first, then the filesystem."""
    if name_or_path in PRESETS:
        return preset(name_or_path, qjk)
    path = Path(name_or_path)
    if not path.is_file():
        raise FileNotFoundError(f"no preset or presentation file named {name_or_path!r}")
    return bind_qjk(parse_presentation(path.read_text(), path.stem), qjk)


# -- normalization ----------------------------------------------------------

def _positions(key: tuple) -> Iterator[tuple]:
    _, _, s1, s2 = key
    for i in range(len(s1) - 1):
        yield ("s1", i, s1[i], s1[i + 1])
    if s2 is not None and s1 and s2:
        yield ("x", 0, s1[-1], s2[0])
    if s2 is not None:
        for i in range(len(s2) - 1):
            yield ("s2", i, s2[i], s2[i + 1])


def _apply(pres: Presentation, key: tuple, index: int, env: dict, where: str, pos: int) -> list:
    alg, blade, s1, s2 = key
    out = []
    for u, v, coeff in pres.instantiate(index, env):
        if where == "x":
            pre, post = s1[:-1], s2[1:]
            new = (alg, blade, pre + u + post, None) if v is None else (alg, blade, pre + u, v + post)
        elif where == "s1":
            new = (alg, blade, s1[:pos] + u + s1[pos + 2:], s2)
        else:
            new = (alg, blade, s1, s2[:pos] + u + s2[pos + 2:])
        out.append((new, coeff))
    return out


class _Engine:
    def __init__(self, pres: Presentation, budget: int) -> None:
        self.pres = pres
        self.budget = budget
        self.steps = 0
        self.memo: dict[tuple, Expression] = {}
        self.active: set[tuple] = set()

    def find(self, key: tuple):
        for where, pos, g1, g2 in _positions(key):
            cross = where == "x"
            for index, rule in enumerate(self.pres.rules):
                if rule.cross != cross:
                    continue
                env = rule.match(g1, g2)
                if env is not None:
                    return index, env, where, pos
        return None

    def step(self, key: tuple, index: int, env: dict, where: str, pos: int) -> list:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(f"more than {self.budget} rule applications in {self.pres.name!r}")
        return _apply(self.pres, key, index, env, where, pos)

    def nf(self, key: tuple) -> Expression:
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        redex = self.find(key)
        if redex is None:
            result = Expression([(key, Scalar.const(1))])
        else:
            if key in self.active:
                raise BudgetExceeded(f"rule cycle through {Expression([(key, Scalar.const(1))])}")
            self.active.add(key)
            try:
                result = Expression()
                for new, coeff in self.step(key, *redex):
                    result = result + self.nf(new).scale(coeff)
            finally:
                self.active.discard(key)
        self.memo[key] = result
        return result

    def normalize(self, expr: Expression) -> Expression:
        out = Expression()
        for key, coeff in expr:
            out = out + self.nf(key).scale(coeff)
        return out


def normalize(e: Expression, p: Presentation, budget: int = DEFAULT_BUDGET) -> Expression:
    """Rewrite to the normal form (leftmost redex, first matching rule in order)."""
    return _Engine(p, budget).normalize(p.transform(e))


def check_identity(lhs: Expression, rhs: Expression, p: Presentation, budget: int = DEFAULT_BUDGET) -> Expression:
    """Residual ``normalize(lhs - rhs)``; empty iff the identity holds modulo ``p``."""
    return normalize(lhs - rhs, p, budget)


# -- local confluence ---------------------------------------------------------

class CriticalPair(NamedTuple):
    overlap: Expression
    rules: tuple[str, str]
    residual: Expression


def _pattern_gens(pg: PatternGen, n: int) -> list[Gen]:
    if pg.index is None:
        return [Gen(pg.kind)]
    if isinstance(pg.index, int):
        return [Gen(pg.kind, pg.index)]
    return [Gen(pg.kind, i) for i in range(1, n + 1)]


def rule_instances(rule: RewriteRule, n: int) -> Iterator[tuple[Gen, Gen, dict]]:
    for g1 in _pattern_gens(rule.left, n):
        for g2 in _pattern_gens(rule.right, n):
            env = rule.match(g1, g2)
            if env is not None:
                yield g1, g2, env


def critical_pairs(p: Presentation, n: int = 2, budget: int = DEFAULT_BUDGET) -> list[CriticalPair]:
    """All one-step overlaps of left-hand sides over indices 1..n with their residuals."""
    if n > 4:
        raise ValueError("critical pair enumeration is limited to indices <= 4")
    engine = _Engine(p, budget)
    rules = p.rules
    out: list[CriticalPair] = []

    def reduct(key, index, env, where, pos) -> Expression:
        return Expression(_apply(p, key, index, env, where, pos))

    def record(key, a, b) -> None:
        r1 = engine.normalize(reduct(key, *a))
        r2 = engine.normalize(reduct(key, *b))
        out.append(CriticalPair(Expression([(key, Scalar.const(1))]), (str(rules[a[0]]), str(rules[b[0]])), r1 - r2))

    for i1, r1 in enumerate(rules):
        for g1, g2, env1 in rule_instances(r1, n):
            # both rules rewrite the same pair
            for i2 in range(i1 + 1, len(rules)):
                r2 = rules[i2]
                if r2.cross != r1.cross:
                    continue
                env2 = r2.match(g1, g2)
                if env2 is None:
                    continue
                key = ("", (), (g1,), (g2,)) if r1.cross else ("", (), (g1, g2), None)
                where = "x" if r1.cross else "s1"
                record(key, (i1, env1, where, 0), (i2, env2, where, 0))
            # chained overlaps sharing g2
            for i2, r2 in enumerate(rules):
                for g3 in _pattern_gens(r2.right, n):
                    env2 = r2.match(g2, g3)
                    if env2 is None:
                        continue
                    if not r1.cross and not r2.cross:
                        key = ("", (), (g1, g2, g3), None)
                        record(key, (i1, env1, "s1", 0), (i2, env2, "s1", 1))
                    elif not r1.cross and r2.cross:
                        key = ("", (), (g1, g2), (g3,))
                        record(key, (i1, env1, "s1", 0), (i2, env2, "x", 0))
                    elif r1.cross and not r2.cross:
                        key = ("", (), (g1,), (g2, g3))
                        record(key, (i1, env1, "x", 0), (i2, env2, "s2", 0))
    return out


# -- termination ------------------------------------------------------------

_GROUPS = ("coordinate", "momentum", "partial", "funsym", "entry")


def termination_witness(p: Presentation, n: int = 3) -> Optional[dict]:
    """Find a graded lexicographic generator order that every rule instance strictly decreases.

    Candidate orders permute the five generator groups and choose ascending or
    descending indices.  Returns the order found, or None.
    """
    instances = []
    for index, rule in enumerate(p.rules):
        for g1, g2, env in rule_instances(rule, n):
            lhs = (g1, g2)
            rhs = [u + (v or ()) for u, v, _ in p.instantiate(index, env)]
            instances.append((lhs, rhs))
    kind_pos = {k: i for i, k in enumerate(KINDS)}
    for perm in itertools.permutations(_GROUPS):
        group_pos = {g: i for i, g in enumerate(perm)}
        for direction in (1, -1):
            def weight(word, gp=group_pos, d=direction):
                return (len(word), tuple((gp[KIND_GROUP[g.kind]], kind_pos[g.kind], d * (g.index or 0)) for g in word))

            if all(weight(r) < weight(lhs) for lhs, rhs in instances for r in rhs):
                return {"groups": perm, "index": "ascending" if direction == 1 else "descending"}
    return None
