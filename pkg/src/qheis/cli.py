"""Command-line front end.

Exit status: 0 success, 1 nonzero verdict, 2 usage error (including unknown
presets and missing files), 3 parse error, 4 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence, TextIO

from .calculus import CalculusError, cauchy_riemann, difference_op, dirac, is_monogenic
from .clifford import CliffordError
from .parser import ParseError, parse_expression, parse_polyfunction
from .rewrite import (
    DEFAULT_BUDGET,
    QJK_BINDINGS,
    PRESETS,
    RewriteError,
    check_identity,
    critical_pairs,
    load_presentation,
    normalize,
)
from .scalars import ScalarError
from .terms import TensorDegreeError
from .verify import CHECKS, SIGNS, plane_relations_report, quantum_det, run_check

EXIT_OK, EXIT_NONZERO, EXIT_USAGE, EXIT_PARSE, EXIT_COMPUTE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="rule application budget")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qheis", description="q-deformed Heisenberg relations on tensor words")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def with_preset(p, required=True):
        p.add_argument("--preset", required=required, help=f"built-in ({', '.join(PRESETS)}) or file path")
        p.add_argument("--qjk", choices=QJK_BINDINGS, default="symbolic", help="binding of Q[j,k]")

    p = sub.add_parser("normalize", parents=[common], help="normal form under a preset")
    with_preset(p)
    p.add_argument("exprs", nargs="*")

    p = sub.add_parser("check", parents=[common], help="residual of LHS - RHS under a preset")
    with_preset(p)
    p.add_argument("exprs", nargs="*", help="LHS RHS, or stdin lines 'LHS = RHS'")

    for verb, helptext in (("dirac", "Dirac operator"), ("cr", "Cauchy-Riemann operator"),
                           ("diffop", "difference operator over B_p"), ("monogenic", "monogenicity test")):
        p = sub.add_parser(verb, parents=[common], help=helptext)
        p.add_argument("--dim", type=int, default=None, help="number of coordinates x1..xm")
        if verb in ("dirac", "monogenic"):
            p.add_argument("--side", choices=("left", "right"), default="left")
        if verb == "diffop":
            p.add_argument("--pair", default="1,2", help="indices j,k (default 1,2)")
        p.add_argument("exprs", nargs="*")

    p = sub.add_parser("detq", parents=[common], help="quantum determinant a d - q c b")
    p.add_argument("exprs", nargs="*", help="entries a b c d (default: symbols)")

    p = sub.add_parser("plane-relations", parents=[common], help="relations forced on a, b, c, d")
    p.add_argument("--q1", action="store_true", help="evaluate at q=1 with commuting entries")

    p = sub.add_parser("verify", parents=[common], help="replay a named check")
    p.add_argument("check", choices=list(CHECKS) + ["all"])
    p.add_argument("--qjk", choices=QJK_BINDINGS, default="q")
    p.add_argument("--sign", choices=SIGNS, default="as-printed")

    p = sub.add_parser("critical-pairs", parents=[common], help="local confluence probe")
    with_preset(p)
    p.add_argument("--n", type=int, default=2, help="index bound (<= 4)")
    return parser


def _inputs(args, stdin: TextIO) -> list[str]:
    if args.exprs:
        return list(args.exprs)
    if stdin is None or stdin.isatty():
        raise UsageError("no input expressions given")
    lines = [ln.strip() for ln in stdin.read().splitlines()]
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _emit(out: TextIO, args, text_lines: list[str], data) -> None:
    if args.json:
        out.write(json.dumps(data, indent=2) + "\n")
    else:
        out.write("".join(line + "\n" for line in text_lines))


def _run(args, stdin: TextIO, out: TextIO) -> int:
    verb = args.verb
    if getattr(args, "budget", 1) < 1:
        raise UsageError("--budget must be positive")

    if verb in ("normalize", "check", "critical-pairs"):
        pres = load_presentation(args.preset, args.qjk)

    if verb == "normalize":
        results = [(text, normalize(parse_expression(text), pres, args.budget)) for text in _inputs(args, stdin)]
        _emit(out, args, [str(r) for _, r in results],
              [{"input": t, "normal_form": r.to_json(), "text": str(r)} for t, r in results])
        return EXIT_OK

    if verb == "check":
        items = _inputs(args, stdin)
        if args.exprs:
            if len(items) != 2:
                raise UsageError("check takes exactly two expressions: LHS RHS")
            pairs = [tuple(items)]
        else:
            pairs = []
            for line in items:
                if line.count("=") != 1:
                    raise UsageError(f"batch line must read 'LHS = RHS': {line!r}")
                pairs.append(tuple(part.strip() for part in line.split("=")))
        results = [(l, r, check_identity(parse_expression(l), parse_expression(r), pres, args.budget)) for l, r in pairs]
        _emit(out, args, [str(res) for _, _, res in results],
              [{"lhs": l, "rhs": r, "residual": res.to_json(), "text": str(res),
                "verdict": "zero" if res.is_zero() else "nonzero"} for l, r, res in results])
        return EXIT_OK if all(res.is_zero() for _, _, res in results) else EXIT_NONZERO

    if verb in ("dirac", "cr", "diffop", "monogenic"):
        algebra = "B" if verb == "diffop" else None
        if verb == "diffop":
            try:
                j, k = (int(v) for v in args.pair.split(","))
            except ValueError:
                raise UsageError(f"--pair must look like 1,2, got {args.pair!r}") from None
        status = EXIT_OK
        lines, data = [], []
        for text in _inputs(args, stdin):
            f = parse_polyfunction(text, args.dim, algebra)
            if verb == "dirac":
                g = dirac(f, args.side)
            elif verb == "cr":
                g = cauchy_riemann(f)
            elif verb == "diffop":
                g = difference_op(f, j, k)
            else:
                ok, g = is_monogenic(f, args.side)
                if not ok:
                    status = EXIT_NONZERO
                lines.append("monogenic" if ok else f"non-monogenic: {g}")
                data.append({"input": text, "monogenic": ok, "witness": g.to_json(), "text": str(g)})
                continue
            lines.append(str(g))
            data.append({"input": text, "result": g.to_json(), "text": str(g)})
        _emit(out, args, lines, data)
        return status

    if verb == "detq":
        entries = args.exprs or ["a", "b", "c", "d"]
        if len(entries) != 4:
            raise UsageError("detq takes four entries a b c d")
        det = quantum_det(*(parse_expression(e) for e in entries))
        _emit(out, args, [str(det)], {"entries": entries, "det": det.to_json(), "text": str(det)})
        return EXIT_OK

    if verb == "plane-relations":
        report = plane_relations_report(args.q1)
        _emit(out, args, [str(r.residual) for r in report.relations], report.to_json())
        return EXIT_OK

    if verb == "verify":
        reports = run_check(args.check, args.qjk, args.sign)
        data = [r.to_json() for r in reports]
        _emit(out, args, ["\n\n".join(r.to_text() for r in reports)], data[0] if len(data) == 1 else data)
        return EXIT_OK if all(r.all_zero for r in reports) else EXIT_NONZERO

    if verb == "critical-pairs":
        if not 1 <= args.n <= 4:
            raise UsageError("--n must be between 1 and 4")
        pairs = critical_pairs(pres, args.n, args.budget)
        lines = [f"{cp.overlap}: {cp.residual}" for cp in pairs]
        lines.append(f"{len(pairs)} critical pairs, {sum(1 for cp in pairs if cp.residual)} with nonzero residual")
        _emit(out, args, lines, [
            {"overlap": cp.overlap.to_json(), "overlap_text": str(cp.overlap), "rules": list(cp.rules),
             "residual": cp.residual.to_json(), "text": str(cp.residual)} for cp in pairs
        ])
        return EXIT_OK if all(not cp.residual for cp in pairs) else EXIT_NONZERO

    raise UsageError(f"unknown verb {verb!r}")


def main(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None) -> int:
    out = stdout or sys.stdout
    stdin = sys.stdin if stdin is None else stdin
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _run(args, stdin, out)
    except (UsageError, KeyError, FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qheis: usage error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TensorDegreeError) as exc:
        print(f"qheis: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (RewriteError, CliffordError, CalculusError, ScalarError, RecursionError) as exc:
        print(f"qheis: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
