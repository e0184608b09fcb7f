"""Command-line front end.

    tableverify verify corpus/paper.ids [--format json] [--jobs 8]
    tableverify eval "integral(x, 0, ln(2), x/(1-exp(-x)))"
    tableverify list corpus/paper.ids

Exit status: 0 on success, 1 when any record does not get its expected
verdict (or an expression fails to evaluate), 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import expr as ex
from . import verify as vf
from .numeric import TableVerifyError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _text_num(v: float | None) -> str:
    return "n/a" if v is None else format(v, ".10g")


def _json_num(v: float | None) -> str:
    if v is None or not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def _report_fields(rep: vf.Report) -> dict:
    lhs = rep.lhs.value if rep.lhs is not None else None
    lhs_err = rep.lhs.err if rep.lhs is not None else None
    rhs = rep.rhs.value if rep.rhs is not None else None
    delta = rep.verdict.discrepancy
    return {
        "lhs": lhs,
        "lhs_err": lhs_err,
        "rhs": rhs,
        "delta": delta if math.isfinite(delta) else None,
    }


def format_text(reports: list[vf.Report], summary: vf.Summary) -> str:
    lines = []
    for rep in reports:
        f = _report_fields(rep)
        lines.append(
            f"{rep.id}  {rep.verdict.tag.value}  "
            f"lhs={_text_num(f['lhs'])}±{_text_num(f['lhs_err'])}  "
            f"rhs={_text_num(f['rhs'])}  Δ={_text_num(f['delta'])}  "
            f"[{'MATCH' if rep.match else 'MISMATCH'}]"
        )
    counts = ", ".join(f"{n} {tag}" for tag, n in summary.by_verdict.items())
    lines.append(
        f"{len(reports)} records: {counts}; "
        f"{summary.matched} match, {summary.mismatched} mismatch"
    )
    return "\n".join(lines) + "\n"


def format_json(reports: list[vf.Report]) -> str:
    """Array of report objects; floats carry 17 significant digits."""
    objs = []
    for rep in reports:
        f = _report_fields(rep)
        parts = [
            f'"id": {json.dumps(rep.id)}',
            f'"verdict": {json.dumps(rep.verdict.tag.value)}',
            f'"lhs": {_json_num(f["lhs"])}',
            f'"lhs_err": {_json_num(f["lhs_err"])}',
            f'"rhs": {_json_num(f["rhs"])}',
            f'"delta": {_json_num(f["delta"])}',
            f'"match": {"true" if rep.match else "false"}',
            f'"ms": {_json_num(round(rep.ms, 3))}',
        ]
        objs.append("  {" + ", ".join(parts) + "}")
    return "[\n" + ",\n".join(objs) + "\n]\n" if objs else "[]\n"


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--tol-abs", type=float, default=vf.DEFAULTS.abs_tol,
                     help="absolute tolerance in the error budget (default %(default)g)")
    tol.add_argument("--tol-rel", type=float, default=vf.DEFAULTS.rel_tol,
                     help="relative tolerance in the error budget (default %(default)g)")
    tol.add_argument("--refute-factor", type=float, default=vf.DEFAULTS.refute_factor,
                     help="refute when the gap exceeds this many budgets (default %(default)g)")
    tol.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(
        prog="tableverify",
        description="Numerically verify integral and series identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[tol], help="verify every record of a corpus file")
    p.add_argument("corpus", help="path to a corpus file")
    p.add_argument("--jobs", type=_positive_int, default=1,
                   help="number of worker threads (default 1)")

    p = sub.add_parser("eval", parents=[tol], help="evaluate one expression")
    p.add_argument("expression")

    p = sub.add_parser("list", help="print record ids and notes without evaluating")
    p.add_argument("corpus")
    return parser


def _options(args: argparse.Namespace) -> vf.Options:
    return vf.Options(abs_tol=args.tol_abs, rel_tol=args.tol_rel,
                      refute_factor=args.refute_factor)


def _load(path: str) -> list[vf.IdentityRecord]:
    try:
        return vf.load_corpus_file(path)
    except OSError as exc:
        raise _UsageError(f"cannot read corpus {path!r}: {exc.strerror or exc}") from None
    except vf.CorpusError as exc:
        raise _UsageError(f"{path}: {exc}") from None


class _UsageError(Exception):
    pass


def _cmd_verify(args: argparse.Namespace) -> int:
    records = _load(args.corpus)
    reports, summary = vf.run_corpus(records, _options(args), args.jobs)
    if args.format == "json":
        sys.stdout.write(format_json(reports))
    else:
        sys.stdout.write(format_text(reports, summary))
    for rep in reports:
        if rep.verdict.message and not rep.match:
            print(f"{rep.id}: {rep.verdict.message}", file=sys.stderr)
    return EXIT_OK if summary.all_match else EXIT_FAIL


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        e = ex.parse(args.expression)
    except ex.ParseError as exc:
        raise _UsageError(f"parse error: {exc}") from None
    try:
        res = vf.evaluate(e, _options(args))
    except (TableVerifyError, ArithmeticError, ValueError) as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    limits = vf.has_limits(e)
    if args.format == "json":
        fields = [f'"value": {_json_num(res.value)}']
        if limits:
            fields.append(f'"err": {_json_num(res.err)}')
        print("{" + ", ".join(fields) + "}")
    elif limits:
        print(f"{res.value:.17g} ± {res.err:.3g}")
    else:
        print(f"{res.value:.17g}")
    return EXIT_OK


def _cmd_list(args: argparse.Namespace) -> int:
    for r in _load(args.corpus):
        print(f"{r.id}  {r.note}" if r.note else r.id)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    handler = {"verify": _cmd_verify, "eval": _cmd_eval, "list": _cmd_list}[args.command]
    try:
        return handler(args)
    except _UsageError as exc:
        print(f"tableverify: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
