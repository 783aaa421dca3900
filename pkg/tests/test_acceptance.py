"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even under
capture) or directly with ``python tests/test_acceptance.py``.  Every
criterion is exact (no floating point) and must finish within 10 seconds.
"""

import contextlib
import io
import itertools
import logging
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qheis.calculus import PolyFunction, dirac, is_monogenic, laplacian
from qheis.cli import main
from qheis.clifford import Blade, Multivector, all_blades, blade_product
from qheis.parser import parse_expression as P, parse_polyfunction
from qheis.rewrite import critical_pairs, normalize, preset, termination_witness
from qheis.scalars import Scalar
from qheis.verify import (
    derive_plane_relations,
    verify_classical_limit,
    verify_lemma_f1,
    verify_prop_bold,
    verify_prop_nonmonogenic,
    verify_theorem_monogenic,
)

from conftest import load_residuals
from strategies import random_expression, random_multivector

TIME_LIMIT = 10.0


@contextlib.contextmanager
def criterion(n, title, capsys=None):
    """Time the block, print the verdict line, then fail the test if needed."""
    notes = []
    start = time.perf_counter()
    error = None
    try:
        yield notes
    except AssertionError as exc:
        error = exc
    elapsed = time.perf_counter() - start
    ok = error is None and elapsed < TIME_LIMIT
    detail = "; ".join(notes) if ok else (str(error) or "assertion failed") if error else f"took {elapsed:.1f}s"
    line = f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title} (exact, {elapsed:.2f}s) {detail}"
    ctx = capsys.disabled() if capsys is not None else contextlib.nullcontext()
    with ctx:
        print(line)
    if error is not None:
        raise error
    assert elapsed < TIME_LIMIT, line


def word_product(a, b):
    word, sign, changed = list(a) + list(b), 1, True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign, changed = -sign, True
            elif word[i] == word[i + 1]:
                del word[i:i + 2]
                sign, changed = -sign, True
                break
    return sign, tuple(word)


def test_01_clifford_exhaustive(capsys=None):
    with criterion(1, "A_m blade products and associativity, m <= 4", capsys) as notes:
        count = 0
        for m in range(1, 5):
            blades = all_blades("A", m)
            for a, b in itertools.product(blades, blades):
                sign, idx = word_product(a.indices, b.indices)
                assert blade_product(a, b) == (Scalar.const(sign), Blade(idx, "A", m)), (a, b)
                count += 1
            for i, j in itertools.product(range(1, m + 1), repeat=2):
                ei, ej = Multivector.blade((i,), "A", m), Multivector.blade((j,), "A", m)
                assert ei * ej + ej * ei == Multivector.scalar(-2 if i == j else 0, "A", m)
        rng = random.Random(1)
        for _ in range(200):
            m = rng.randint(1, 4)
            a, b, c = (random_multivector(rng, "A", m) for _ in range(3))
            assert (a * b) * c == a * (b * c)
        notes.append(f"{count} blade products, 200 random triples")


class _Counter(logging.Handler):
    def __init__(self):
        super().__init__(logging.INFO)
        self.count = 0

    def emit(self, record):
        self.count += 1


def test_02_b_algebra(capsys=None):
    with criterion(2, "B_p squares, vanishing products and diagnostics, p <= 4", capsys) as notes:
        log = logging.getLogger("qheis.clifford")
        handler = _Counter()
        old_level = log.level
        log.addHandler(handler)
        log.setLevel(logging.INFO)
        try:
            vanishing = 0
            for p in range(1, 5):
                for j, k in itertools.product(range(1, p + 1), repeat=2):
                    ej, ek = Multivector.blade((j,), "B", p), Multivector.blade((k,), "B", p)
                    if j == k:
                        assert ej * ek == Multivector.scalar(1, "B", p)
                    else:
                        before = handler.count
                        assert (ej * ek).is_zero()
                        assert handler.count == before + 1
                        vanishing += 1
        finally:
            log.removeHandler(handler)
            log.setLevel(old_level)
        notes.append(f"{vanishing} vanishing products, {handler.count} diagnostics")
        assert handler.count == vanishing


def test_03_dirac_squared(capsys=None):
    with criterion(3, "Dirac squared equals minus the Laplacian, degree <= 3, m <= 3", capsys) as notes:
        count = 0
        for m in range(1, 4):
            for exps in itertools.product(range(4), repeat=m + 1):
                if sum(exps) > 3:
                    continue
                f = PolyFunction([(exps, Multivector.scalar(1, "A", m))], "A", m)
                assert dirac(dirac(f)) == -laplacian(f), f
                count += 1
        notes.append(f"{count} monomials")


def test_04_monogenicity(capsys=None):
    with criterion(4, "monogenicity of x1 e1 - x2 e2 and x1 e1 + x2 e2", capsys) as notes:
        # hand expansion: D(x1 e1 -/+ x2 e2) = e1 e1 -/+ e2 e2 = (-1) -/+ (-1)
        ok, witness = is_monogenic(parse_polyfunction("x1*E[1] - x2*E[2]"))
        assert ok and witness.is_zero()
        ok, witness = is_monogenic(parse_polyfunction("x1*E[1] + x2*E[2]"))
        assert not ok and witness == PolyFunction.constant(Multivector.scalar(-2, "A", 2))
        notes.append("witness -2")


def test_05_normalization(capsys=None):
    with criterion(5, "termination, idempotence on 500 inputs, critical pairs", capsys) as notes:
        for name in ("qplane", "dual-plane", "qheis2", "qheis-f"):
            pres = preset(name)
            assert termination_witness(pres, 3) is not None, name
            rng = random.Random(name)
            for _ in range(500):
                nf = normalize(random_expression(rng, n=3), pres)
                assert normalize(nf, pres) == nf, name
            pairs = critical_pairs(pres, 3)
            assert all(cp.residual.is_zero() for cp in pairs), name
            notes.append(f"{name}: {len(pairs)} pairs")


def _golden_match(report, residuals, labels):
    for label in labels:
        assert report[label].residual == residuals[(report.check, "-", label)], label


def test_06_proposition_replay(capsys=None):
    with criterion(6, "Clifford relation replay against hand-derived residuals", capsys) as notes:
        residuals = load_residuals()
        nm = verify_prop_nonmonogenic()
        for label in ("ro1 left", "ro1 right", "ro2 x^ with k!=j", "ro2 p^ with k!=j", "ro3", "ro4"):
            assert nm[label].residual.is_zero(), label
        _golden_match(nm, residuals, ("ro2 x^ with k=j", "ro2 p^ with k=j"))
        assert not nm["ro2 x^ with k=j"].residual.is_zero()
        bold = verify_prop_bold()
        assert bold["t3"].residual.is_zero() and bold["t4"].residual.is_zero()
        _golden_match(bold, residuals, ("t1a without auxiliary identity", "t2a without auxiliary identity"))
        assert not bold["t1a without auxiliary identity"].residual.is_zero()
        lemma = verify_lemma_f1("q", "as-printed")
        key = ("lemma-f1", "qjk=q sign=as-printed", "mixed pair x[1],p[1] with Q[1,1]")
        assert lemma["mixed pair x[1],p[1] with Q[1,1]"].residual == residuals[key] == P("2*i*hbar")
        notes.append("zero cases zero, nonzero cases equal golden")


def test_07_theorem_replay(capsys=None):
    with criterion(7, "momentum relations at f=0 and f=x1 e1 under the dual plane", capsys) as notes:
        report = verify_theorem_monogenic()
        assert report["ro3 at f=0"].residual.is_zero()
        assert report["ro4 at f=0"].residual.is_zero()
        # hand-derived Df terms: Df = e1 e1 = -1 and d1 f = e1
        assert report["ro3 at f=x1*E[1]"].residual == P("-hbar^2 * (1 ox d[2])")
        assert report["ro4 at f=x1*E[1]"].residual == P("hbar^2 * (E[1,2] ox d[2]) + q^-1*hbar^2 * (1 ox d[1])")
        notes.append("f=0 zero, f=x1 e1 equals the Df term")


def test_08_plane_relations(capsys=None):
    with criterion(8, "quantum plane endomorphism relations", capsys) as notes:
        oracle = [P("c a - q * (a c)"), P("c b + q * (d a) - q * (a d) - q^2 * (b c)"), P("d b - q * (b d)")]
        got = derive_plane_relations()
        assert len(got) == 3
        for rel in got:
            assert rel in oracle or -rel in oracle, rel
        assert {str(r) for r in got} | {str(-r) for r in got} >= {str(o) for o in oracle}
        assert all(r.is_zero() for r in derive_plane_relations(q_limit=True))
        notes.append("3 relations, all 0 at q=1")


def test_09_classical_limit(capsys=None):
    with criterion(9, "classical commutators at q=1, f=1", capsys) as notes:
        report = verify_classical_limit()
        selected = [r for r in report.relations if r.label.startswith(("qheis2:", "qheis-f unified:"))]
        assert selected and all(r.residual.is_zero() for r in selected)
        notes.append(f"{len(selected)} relations zero")


def _run_cli(argv, stdin=""):
    out = io.StringIO()
    with contextlib.redirect_stderr(io.StringIO()):
        code = main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def test_10_cli(capsys=None):
    with criterion(10, "parse/render round trip, deterministic output, exit statuses", capsys) as notes:
        rng = random.Random(10)
        for _ in range(1000):
            e = random_expression(rng)
            assert P(str(e)) == e, str(e)
        for argv in (["verify", "all", "--json"], ["normalize", "--preset", "qheis-f", "x[1] ox p[1] + p[1] ox p[2]"],
                     ["plane-relations"], ["critical-pairs", "--preset", "qheis2", "--n", "3", "--json"]):
            assert _run_cli(argv) == _run_cli(argv)
        statuses = {
            0: _run_cli(["normalize", "--preset", "qplane", "x[2] ox x[1]"])[0],
            1: _run_cli(["verify", "lemma-f1", "--qjk=q", "--sign=as-printed"])[0],
            2: _run_cli(["normalize", "--preset", "no-such-preset", "x[1]"])[0],
            3: _run_cli(["normalize", "--preset", "qplane", "x["])[0],
            4: _run_cli(["diffop", "--pair", "1,1", "x1"])[0],
        }
        assert all(k == v for k, v in statuses.items()), statuses
        notes.append("1000 round trips, statuses 0-4 observed")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
