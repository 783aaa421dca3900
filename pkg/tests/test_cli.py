import io
import json
import subprocess
import sys

import pytest

from qheis.cli import main
from qheis.parser import parse_expression
from qheis.terms import Expression


def run(argv, stdin=""):
    out = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def test_normalize_qplane():
    assert run(["normalize", "--preset", "qplane", "x[2] ox x[1]"]) == (0, "q * (x[1] ox x[2])\n")


def test_detq_default():
    assert run(["detq"]) == (0, "a d - q * (c b)\n")


def test_verify_lemma_exit_status():
    code, out = run(["verify", "lemma-f1", "--qjk=q", "--sign=as-printed"])
    assert code == 1 and "2*i*hbar" in out
    assert run(["verify", "lemma-f1", "--qjk=q", "--sign=unified"])[0] == 0


def test_batch_stdin():
    code, out = run(["normalize", "--preset", "qheis2"], "x[1] ox p[1]\n# comment\n\nx[1] ox x[2]\n")
    assert code == 0
    assert out.splitlines() == ["i*hbar + q * (p[1] ox x[1])", "q^-1 * (x[2] ox x[1])"]


def test_check_verb():
    assert run(["check", "--preset", "qheis2", "x[1] ox p[1]", "q * (p[1] ox x[1]) + i*hbar"]) == (0, "0\n")
    code, out = run(["check", "--preset", "qheis2"], "x[1] ox p[1] = q * (p[1] ox x[1])\n")
    assert code == 1 and out == "i*hbar\n"


def test_calculus_verbs():
    assert run(["dirac", "x1*E[1] + x2*E[2]"]) == (0, "-2\n")
    assert run(["dirac", "--side", "right", "x1*E[2]"]) == (0, "-E[1,2]\n")
    assert run(["cr", "x0 + x1*E[1]"]) == (0, "0\n")
    assert run(["diffop", "x1*x2"]) == (0, "x2*be[2] + x1*be[1]\n")
    assert run(["monogenic", "x1*E[1] - x2*E[2]"]) == (0, "monogenic\n")
    assert run(["monogenic", "x1*E[1] + x2*E[2]"]) == (1, "non-monogenic: -2\n")
    assert run(["dirac", "--dim", "3", "x1*E[1]"]) == (0, "-1\n")


def test_plane_relations_and_critical_pairs():
    code, out = run(["plane-relations", "--q1"])
    assert code == 0 and out == "0\n0\n0\n"
    code, out = run(["critical-pairs", "--preset", "qheis2", "--n", "2"])
    assert code == 0 and out.endswith("0 with nonzero residual\n")


def test_json_output():
    code, out = run(["normalize", "--preset", "qplane", "--json", "x[2] ox x[1]"])
    data = json.loads(out)
    assert code == 0
    assert Expression.from_json(data[0]["normal_form"]) == parse_expression("q * (x[1] ox x[2])")
    code, out = run(["verify", "prop-bold", "--json"])
    data = json.loads(out)
    assert data["check"] == "prop-bold" and code == 1


def test_preset_from_file(tmp_path):
    path = tmp_path / "rules.txt"
    path.write_text("x[j] ox x[k] | j>k -> x[k] ox x[j]\n")
    assert run(["normalize", "--preset", str(path), "x[2] ox x[1]"]) == (0, "x[1] ox x[2]\n")


@pytest.mark.parametrize("argv, stdin, status", [
    ([], "", 2),
    (["normalize", "--preset", "nope", "x[1]"], "", 2),
    (["normalize", "--preset", "/no/such/file.txt", "x[1]"], "", 2),
    (["normalize", "--preset", "qplane", "--qjk", "weird", "x[1]"], "", 2),
    (["check", "--preset", "qplane", "x[1]"], "", 2),
    (["critical-pairs", "--preset", "qplane", "--n", "9"], "", 2),
    (["normalize", "--preset", "qplane", "x["], "", 3),
    (["normalize", "--preset", "qplane", "x[1] ox x[2] ox x[3]"], "", 3),
    (["normalize", "--preset", "qplane", "E[1] be[1]"], "", 3),
    (["dirac", "x1*"], "", 3),
    (["diffop", "--pair", "1,1", "x1"], "", 4),
    (["dirac", "x1*be[1]"], "", 4),
    (["normalize", "--preset", "qplane", "hbar^-1"], "", 3),
    (["diffop", "x1*E[1]"], "", 4),
    (["check", "--preset", "qheis2", "x[1] ox p[1]", "0"], "", 1),
])
def test_exit_statuses(argv, stdin, status, capsys):
    code, _ = run(argv, stdin)
    assert code == status
    if status >= 2 and argv:
        assert "qheis" in capsys.readouterr().err


def test_budget_exit(tmp_path):
    path = tmp_path / "loop.txt"
    path.write_text("x[1] x[1] -> x[1] x[1] x[1]\n")
    assert run(["normalize", "--preset", str(path), "--budget", "20", "x[1] x[1]"])[0] == 4


def test_byte_identical_runs():
    argv = [sys.executable, "-m", "qheis", "verify", "all", "--json"]
    first = subprocess.run(argv, capture_output=True, check=False)
    second = subprocess.run(argv, capture_output=True, check=False)
    assert first.returncode == second.returncode == 1
    assert first.stdout == second.stdout and first.stdout
