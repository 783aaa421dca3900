"""Mechanical replay of the deformed Heisenberg relations and their Clifford variants.

Every check instantiates relations at j=1, k=2, moves each one into the form
``P = lhs - rhs`` and normalizes ``P`` under a named presentation.  A relation
holds exactly when its residual is the empty expression.  Substitutions are
recorded as text so that a report can be replayed by hand or through the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .calculus import PolyFunction, dirac, partial
from .clifford import Multivector
from .parser import parse_expression
from .rewrite import Presentation, bind_qjk, check_identity, normalize, parse_presentation, preset
from .scalars import Scalar
from .terms import Expression, Gen

__all__ = [
    "RelationResult",
    "VerificationReport",
    "verify_lemma_f1",
    "verify_prop_nonmonogenic",
    "verify_theorem_monogenic",
    "verify_prop_bold",
    "verify_classical_limit",
    "quantum_det",
    "derive_plane_relations",
    "plane_relations_report",
    "CHECKS",
    "run_check",
]

J, K = 1, 2
ENV = {"j": J, "k": K}
SIGNS = ("as-printed", "unified")
EMPTY = Presentation("empty", ())


@dataclass(frozen=True)
class RelationResult:
    label: str
    substitutions: tuple[str, ...]
    residual: Expression

    @property
    def verdict(self) -> str:
        return "zero" if self.residual.is_zero() else "nonzero"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "substitutions": list(self.substitutions),
            "residual": self.residual.to_json(),
            "residual_text": str(self.residual),
            "verdict": self.verdict,
        }


@dataclass
class VerificationReport:
    check: str
    config: dict = field(default_factory=dict)
    relations: list[RelationResult] = field(default_factory=list)

    def add(self, label: str, residual: Expression, substitutions: Iterable[str] = ()) -> RelationResult:
        entry = RelationResult(label, tuple(substitutions), residual)
        self.relations.append(entry)
        return entry

    def __getitem__(self, label: str) -> RelationResult:
        for r in self.relations:
            if r.label == label:
                return r
        raise KeyError(label)

    def labels(self) -> list[str]:
        return [r.label for r in self.relations]

    @property
    def all_zero(self) -> bool:
        return all(r.verdict == "zero" for r in self.relations)

    def to_json(self) -> dict:
        return {"check": self.check, "config": dict(self.config), "relations": [r.to_json() for r in self.relations]}

    def to_text(self) -> str:
        lines = [f"check: {self.check}"]
        if self.config:
            lines.append("config: " + " ".join(f"{k}={v}" for k, v in self.config.items()))
        for r in self.relations:
            lines.append(f"[{r.verdict}] {r.label}: {r.residual}")
            if r.substitutions:
                lines.append("    substitutions: " + "; ".join(r.substitutions))
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.to_text()


def _e(text: str, **slots: str) -> Expression:
    """Parse ``text`` at j=1, k=2 after splicing parenthesized placeholder values."""
    return parse_expression(text.format(**{k: f"({v})" for k, v in slots.items()}), ENV)


_SLOT_NAMES = {"xh": "x^", "ph": "p^", "pj": "p[1]", "pk": "p[2]", "dfj": "df[1]", "dfk": "df[2]", "f": "f"}


def _subs_text(slots: dict[str, str]) -> list[str]:
    return [f"{_SLOT_NAMES.get(name, name)} := {value}" for name, value in slots.items()]


def _inert(mapping: dict[str, str]) -> tuple[dict[Gen, Expression], list[str]]:
    """Generator substitutions such as ``f := 1``, with their report text."""
    out = {}
    for lhs, rhs in mapping.items():
        (key, _), = parse_expression(lhs).terms
        out[key[2][0]] = parse_expression(rhs)
    return out, [f"{lhs} := {rhs}" for lhs, rhs in mapping.items()]


# -- f = 1 against the undeformed-function relations --------------------------

def verify_lemma_f1(qjk: str = "q", sign: str = "as-printed") -> VerificationReport:
    """Set f := 1 and its partials to 0 and compare with the constant-term relations.

    Each relation is turned into ``P = lhs - rhs``; the residual is
    ``P_f - P_h`` where ``P_f`` comes from the function-dependent family and
    ``P_h`` from the plain tensor relations.
    """
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {SIGNS}, got {sign!r}")
    report = VerificationReport("lemma-f1", {"qjk": qjk, "sign": sign})
    pres = bind_qjk(EMPTY, qjk)
    mapping, subs = _inert({"f": "1", "df[1]": "0", "df[2]": "0"})
    s = "-" if sign == "as-printed" else ""

    def compare(label, pf, ph):
        pf = pf.substitute(mapping)
        report.add(label, normalize(pf - ph, pres), subs + ([f"Q[j,k] bound as {qjk}"] if "Q[" in label else []))

    xx = "x[j] ox x[k] - q^-1 * (x[k] ox x[j])"
    compare("position pair x[1],x[2]", _e(xx), _e(xx))
    pf = _e("p[j] ox p[k] - q^-1 * (p[k] ox p[j]) + i*hbar * (df[j] ox p[k] - q^-1 * (df[k] ox p[j]))")
    compare("momentum pair p[1],p[2]", pf, _e("p[j] ox p[k] - q^-1 * (p[k] ox p[j])"))
    for j, k in ((J, J), (J, K)):
        env = {"j": j, "k": k}
        pf = parse_expression(f"x[j] ox p[k] - Q[j,k] * (p[k] ox x[j]) - ({s}i*hbar*delta[j,k] * f)", env)
        ph = parse_expression("x[j] ox p[k] - q * (p[k] ox x[j]) - i*hbar*delta[j,k]", env)
        compare(f"mixed pair x[{j}],p[{k}] with Q[{j},{k}]", pf, ph)

    # the proof's route: the momentum relation at f=1 is the dual plane once p = -i*hbar*d
    pf = _e("p[j] ox p[k] - q^-1 * (p[k] ox p[j]) + i*hbar * (df[j] ox p[k] - q^-1 * (df[k] ox p[j]))")
    pmap, psubs = _inert({"p[1]": "-i*hbar*d[1]", "p[2]": "-i*hbar*d[2]"})
    report.add(
        "momentum pair as dual plane",
        normalize(pf.substitute(mapping).substitute(pmap), preset("dual-plane")),
        subs + psubs + ["normalized under dual-plane"],
    )
    report.add(
        "position pair as quantum plane",
        normalize(_e(xx), preset("qplane")),
        ["normalized under qplane"],
    )
    return report


# -- Clifford-valued f ------------------------------------------------------------

def _bind_component(pres: Presentation, component: str) -> Presentation:
    """Read the rule's inert f as one component, as the proof does when it fixes f = f_j."""
    mapping, _ = _inert({"f": component})
    return pres.with_symbols(mapping)


def verify_prop_nonmonogenic() -> VerificationReport:
    """Left and right Clifford multiples of the function-dependent relations, j=1, k=2."""
    report = VerificationReport("prop-nonmonogenic", {"preset": "qheis-f", "qjk": "symbolic"})
    base = preset("qheis-f")
    f_full = "f[1] E[1] + f[2] E[2]"

    def run(label, lhs, rhs, slots, pres=base, extra=()):
        residual = check_identity(_e(lhs, **slots), _e(rhs, **slots), pres)
        report.add(label, residual, _subs_text(slots) + list(extra))

    # positions: left by e_j, right by e_k
    run("ro1 left", "{xh} ox x[k]", "q^-1 * (x[k] ox {xh})", {"xh": "E[1] x[1]"})
    run("ro1 right", "x[j] ox {xh}", "q^-1 * ({xh} ox x[j])", {"xh": "x[2] E[2]"})

    # first mixed relation, x^ = e_j x_j against p_k; at k=j the proof reads f as f_j e_j
    run("ro2 x^ with k!=j", "{xh} ox p[k] - Q[j,k] * (p[k] ox {xh})", "-i*hbar*delta[j,k] * {f}",
        {"xh": "E[1] x[1]", "f": f_full})
    pres = _bind_component(base, "f[1]")
    report.add(
        "ro2 x^ with k=j",
        check_identity(
            parse_expression("E[1] x[1] ox p[1] - Q[1,1] * (p[1] ox E[1] x[1])"),
            parse_expression(f"-i*hbar * ({f_full})"),
            pres,
        ),
        ["x^ := E[1] x[1]", f"f := {f_full}", "rule f read as f[1]"],
    )
    # second mixed relation, p^ = p_k e_k
    run("ro2 p^ with k!=j", "x[j] ox {ph} - Q[j,k] * ({ph} ox x[j])", "-i*hbar*delta[j,k]", {"ph": "p[2] E[2]"})
    report.add(
        "ro2 p^ with k=j",
        check_identity(
            parse_expression("x[1] ox p[1] E[1] - Q[1,1] * (p[1] E[1] ox x[1])"),
            parse_expression("-i*hbar"),
            pres,
        ),
        ["p^ := p[1] E[1]", "rule f read as f[1]"],
    )

    # momentum relations, Df as the single term the proof uses, then as the full Dirac sum
    ro3_l = "{ph} ox p[k] - q^-1 * (p[k] ox {ph})"
    ro3_r = "-i*hbar * ({Df} ox p[k] - q^-1 * (df[k] ox {ph}))"
    run("ro3", ro3_l, ro3_r, {"ph": "E[1] p[1]", "Df": "E[1] df[1]"})
    run("ro3 with full Dirac sum", ro3_l, ro3_r, {"ph": "E[1] p[1]", "Df": "E[1] df[1] + E[2] df[2]"})
    ro4_l = "p[j] ox {ph} - q^-1 * ({ph} ox p[j])"
    ro4_r = "-i*hbar * (df[j] ox {ph} - q^-1 * ({Df} ox p[j]))"
    run("ro4", ro4_l, ro4_r, {"ph": "p[2] E[2]", "Df": "E[2] df[2]"})
    run("ro4 with full Dirac sum", ro4_l, ro4_r, {"ph": "p[2] E[2]", "Df": "E[1] df[1] + E[2] df[2]"})
    return report


def _poly_text(f: PolyFunction) -> str:
    return str(f.to_expression())


def verify_theorem_monogenic(f: Optional[PolyFunction] = None) -> VerificationReport:
    """Momentum relations with p = -i*hbar*d against the dual plane.

    By default runs f = 0 and the non-monogenic f = x1*E[1]; pass ``f`` to run
    a single function instead.
    """
    report = VerificationReport("theorem-monogenic", {"preset": "dual-plane"})
    pres = preset("dual-plane")
    if f is None:
        x1e1 = PolyFunction.coordinate(1, 2) * Multivector.blade((1,), "A", 2)
        functions = [("f=0", PolyFunction.zero(2)), ("f=x1*E[1]", x1e1)]
    else:
        functions = [(f"f={f}", f)]
    for tag, fn in functions:
        Df = _poly_text(dirac(fn, "left"))
        d1 = _poly_text(partial(fn, J))
        d2 = _poly_text(partial(fn, K))
        common = {"pj": "-i*hbar*d[1]", "pk": "-i*hbar*d[2]", "Df": Df}
        ro3 = dict(common, ph="-i*hbar*E[1] d[1]", dfk=d2)
        lhs = _e("{ph} ox {pk} - q^-1 * ({pk} ox {ph})", **ro3)
        rhs = _e("-i*hbar * ({Df} ox {pk} - q^-1 * ({dfk} ox {ph}))", **ro3)
        report.add(f"ro3 at {tag}", check_identity(lhs, rhs, pres), _subs_text(ro3))
        ro4 = dict(common, ph="-i*hbar*E[2] d[2]", dfj=d1)
        lhs = _e("{pj} ox {ph} - q^-1 * ({ph} ox {pj})", **ro4)
        rhs = _e("-i*hbar * ({dfj} ox {ph} - q^-1 * ({Df} ox {pj}))", **ro4)
        report.add(f"ro4 at {tag}", check_identity(lhs, rhs, pres), _subs_text(ro4))
    return report


# -- B_p blades -------------------------------------------------------------------

_T1A_BASE = "x[1] ox p[2] -> Q[1,2] * (p[2] ox x[1]) - i*hbar*delta[1,2] * f[1]"
_T1A_AUX = "x[2] ox p[2] -> Q[1,2] * (p[2] ox x[2]) - i*hbar*delta[1,2] * f[2]"
_T2A_BASE = "x[1] ox p[2] -> Q[1,2] * (p[2] ox x[1]) - i*hbar*delta[1,2] * f[2]"
_T2A_AUX = "x[1] ox p[1] -> Q[1,2] * (p[1] ox x[1]) - i*hbar*delta[1,2] * f[1]"

BOLD = {
    "xb": "x[1] be[2] + x[2] be[1]",
    "pb": "p[1] be[2] + p[2] be[1]",
    "fb": "f[1] be[2] + f[2] be[1]",
}


def verify_prop_bold() -> VerificationReport:
    """Bold generators over B_p with symbolic pair parameters Q[j,k]."""
    report = VerificationReport("prop-bold", {"preset": "qheis-fjk", "qjk": "symbolic", "algebra": "B"})
    fjk = preset("qheis-fjk")

    t3 = ("be[2] p[1] ox p[2] - Q[1,2]^-1 * (p[2] ox be[2] p[1])",
          "-i*hbar * (be[2] df[1] ox p[2] - Q[1,2]^-1 * (be[2] df[2] ox p[1]))")
    report.add("t3", check_identity(_e(t3[0]), _e(t3[1]), fjk), ["df[j] inert"])
    t4 = ("p[1] ox be[1] p[2] - Q[1,2]^-1 * (be[1] p[2] ox p[1])",
          "-i*hbar * (be[1] df[1] ox p[2] - Q[1,2]^-1 * (be[1] df[2] ox p[1]))")
    report.add("t4", check_identity(_e(t4[0]), _e(t4[1]), fjk), ["df[j] inert"])

    t1a = (_e("{xb} ox p[2] - Q[1,2] * (p[2] ox {xb})", xb=BOLD["xb"]), _e("-i*hbar*delta[1,2] * {fb}", fb=BOLD["fb"]))
    t2a = (_e("x[1] ox {pb} - Q[1,2] * ({pb} ox x[1])", pb=BOLD["pb"]), _e("-i*hbar*delta[1,2] * {fb}", fb=BOLD["fb"]))
    for label, (lhs, rhs), base, aux, sub in (
        ("t1a", t1a, _T1A_BASE, _T1A_AUX, "x^ := " + BOLD["xb"]),
        ("t2a", t2a, _T2A_BASE, _T2A_AUX, "p^ := " + BOLD["pb"]),
    ):
        subs = [sub, "f := " + BOLD["fb"]]
        with_aux = parse_presentation(f"{base}\n{aux}\n", f"{label}-with-auxiliary")
        without = parse_presentation(f"{base}\n", f"{label}-base")
        report.add(f"{label} with auxiliary identity", check_identity(lhs, rhs, with_aux), subs + [f"rules: {base}; {aux}"])
        report.add(f"{label} without auxiliary identity", check_identity(lhs, rhs, without), subs + [f"rules: {base}"])

    # the add-and-subtract chain for t1a; consecutive lines must agree identically
    chain = [
        "be[2] x[1] ox p[2] - Q[1,2] * (p[2] ox be[2] x[1])",
        "be[2] x[1] ox p[2] - Q[1,2] * (p[2] ox be[2] x[1]) + be[1] x[2] ox p[2] - be[1] x[2] ox p[2]"
        " - Q[1,2] * (p[2] ox be[1] x[2]) + Q[1,2] * (p[2] ox be[1] x[2])",
        "(be[1] x[2] + be[2] x[1]) ox p[2] - Q[1,2] * (p[2] ox (be[1] x[2] + be[2] x[1]))"
        " - be[1] x[2] ox p[2] + Q[1,2] * (p[2] ox be[1] x[2])",
        "{xb} ox p[2] - Q[1,2] * (p[2] ox {xb}) - be[1] x[2] ox p[2] + Q[1,2] * (p[2] ox be[1] x[2])",
    ]
    lines = [_e(text, xb=BOLD["xb"]) for text in chain]
    for n in range(1, len(lines)):
        report.add(f"t1a proof step {n}->{n + 1}", check_identity(lines[n - 1], lines[n], EMPTY), ["no rules"])
    return report


# -- q -> 1 -------------------------------------------------------------------------

_CLASSICAL_PAIRS = (
    ("[x,x]", "x[j] x[k] - x[k] x[j]", ((1, 2),)),
    ("[x,p]", "x[j] p[k] - p[k] x[j] - i*hbar*delta[j,k] * f", ((1, 1), (1, 2), (2, 1), (2, 2))),
    ("[p,p]", "p[j] p[k] - p[k] p[j] + i*hbar * (df[j] p[k] - df[k] p[j])", ((1, 2),)),
)


def _lift(word_expr: Expression) -> Expression:
    """Send each degree-one word g h to g ox h."""
    out = Expression()
    for (alg, blade, s1, s2), c in word_expr:
        if s2 is not None or len(s1) not in (0, 2):
            raise ValueError(f"cannot lift {word_expr} to a tensor relation")
        if not s1:
            out = out + Expression([((alg, blade, (), None), c)])
        else:
            out = out + Expression([((alg, blade, (s1[0],), (s1[1],)), c)])
    return out


def verify_classical_limit() -> VerificationReport:
    """Commutator relations with f=1, lifted to tensors and reduced at q=1."""
    report = VerificationReport("classical-limit", {"q": "1", "f": "1"})
    mapping, subs = _inert({"f": "1", "df[1]": "0", "df[2]": "0"})
    targets = [
        ("qheis2", preset("qheis2").limit_q1()),
        ("qheis-f unified", preset("qheis-f-unified", "q").with_symbols(mapping).limit_q1()),
        ("qheis-f as-printed", preset("qheis-f", "q").with_symbols(mapping).limit_q1()),
    ]
    for name, pres in targets:
        for bracket, template, pairs in _CLASSICAL_PAIRS:
            for j, k in pairs:
                rel = parse_expression(template, {"j": j, "k": k}).substitute(mapping)
                lifted = _lift(rel)
                label = f"{name}: {bracket} j={j} k={k}"
                report.add(label, normalize(lifted, pres), subs + ["g h lifted to g ox h", "q := 1"])
    return report


# -- quantum matrices ---------------------------------------------------------------

def quantum_det(a: Expression, b: Expression, c: Expression, d: Expression) -> Expression:
    """a d - q c b in the word algebra."""
    for e in (a, b, c, d):
        if e.degree > 1:
            raise ValueError("matrix entries must have tensor degree 1")
    return a * d - (c * b).scale(Scalar.param("q"))


PLANE_BASIS = ("x[1] ox x[1]", "x[1] ox x[2]", "x[2] ox x[2]")


def derive_plane_relations(q_limit: bool = False) -> list[Expression]:
    """Relations on a, b, c, d forced by x'_k ox x'_j = q x'_j ox x'_k.

    x'_1 = a x_1 + b x_2 and x'_2 = c x_1 + d x_2; entries commute with the
    coordinates, so each product of two primed coordinates splits into an
    entry word times a coordinate tensor.  Coordinate tensors are reduced by
    the quantum plane rule and the coefficient of each basis tensor is one
    relation.  With ``q_limit`` the result is taken at q=1 and reduced with
    commuting entries.
    """
    x1, x2 = Gen("coordinate", 1), Gen("coordinate", 2)
    primed = {
        1: [(Gen("a"), x1), (Gen("b"), x2)],
        2: [(Gen("c"), x1), (Gen("d"), x2)],
    }
    qplane = preset("qplane")
    q = Scalar.param("q")
    coeffs: dict[tuple, Expression] = {}

    def accumulate(left, right, scale):
        for e1, g1 in left:
            for e2, g2 in right:
                reduced = normalize(Expression.tensor_of((g1,), (g2,)), qplane)
                for (_, _, s1, s2), c in reduced:
                    key = (s1, s2)
                    coeffs[key] = coeffs.get(key, Expression()) + Expression.word((e1, e2), c * scale)

    accumulate(primed[2], primed[1], Scalar.const(1))
    accumulate(primed[1], primed[2], -q)
    out = []
    for basis in PLANE_BASIS:
        (key, _), = parse_expression(basis).terms
        rel = coeffs.get((key[2], key[3]), Expression())
        if q_limit:
            rel = normalize(rel.limit_q1(), preset("commuting-entries"))
        out.append(rel)
    return out


def plane_relations_report(q_limit: bool = False) -> VerificationReport:
    report = VerificationReport("plane-relations", {"q": "1" if q_limit else "symbolic"})
    subs = ["x'[1] := a x[1] + b x[2]", "x'[2] := c x[1] + d x[2]", "entries commute with x"]
    if q_limit:
        subs += ["q := 1", "entries commute"]
    for basis, rel in zip(PLANE_BASIS, derive_plane_relations(q_limit)):
        report.add(f"coefficient of {basis}", rel, subs)
    return report


CHECKS = {
    "lemma-f1": verify_lemma_f1,
    "prop-nonmonogenic": verify_prop_nonmonogenic,
    "theorem-monogenic": verify_theorem_monogenic,
    "prop-bold": verify_prop_bold,
    "classical-limit": verify_classical_limit,
}


def run_check(name: str, qjk: str = "q", sign: str = "as-printed") -> list[VerificationReport]:
    if name == "all":
        return [run_check(n, qjk, sign)[0] for n in CHECKS]
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECKS)}, all")
    if name == "lemma-f1":
        return [verify_lemma_f1(qjk, sign)]
    return [CHECKS[name]()]


def reports_json(reports: list[VerificationReport]) -> str:
    data = [r.to_json() for r in reports]
    return json.dumps(data[0] if len(data) == 1 else data, indent=2, sort_keys=False)
