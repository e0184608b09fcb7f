"""Identity records, the corpus format, and verdicts.

A corpus is a text file of records::

    [entry]
    id     = "GR-3.411.5"
    lhs    = "integral(x, 0, ln(2), x / (1 - exp(-x)))"
    rhs    = "pi^2 / 12"
    expect = "verified"
    note   = "..."

Blank lines separate entries and ``#`` starts a comment line.  Each record
states the verdict it is expected to receive, so refuted and divergent
entries count as successes when they are classified as such.
"""

from __future__ import annotations

import math
import re
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import expr as ex
from . import quad, series
from .numeric import (
    DomainError,
    EvaluationError,
    NoDecayError,
    NumericResult,
    TableVerifyError,
)

_EPS = 2.220446049250313e-16


class Tag(str, Enum):
    VERIFIED = "verified"
    REFUTED = "refuted"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"
    ERROR = "error"


EXPECTABLE = (Tag.VERIFIED, Tag.REFUTED, Tag.DIVERGENT)


@dataclass(frozen=True)
class Options:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    refute_factor: float = 100.0
    refute_floor: float = 1e-6
    quad_tol: float = 1e-12
    series_tol: float = 1e-15


DEFAULTS = Options()


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    lhs: ex.Expression
    rhs: ex.Expression
    expect: Tag
    note: str = ""

    @property
    def kind(self) -> str:
        if isinstance(self.lhs, ex.Integral):
            return "integral"
        if isinstance(self.lhs, ex.Sum):
            return "series"
        return "closed"


@dataclass(frozen=True)
class Verdict:
    tag: Tag
    discrepancy: float = math.nan
    budget: float = math.nan
    message: str = ""


@dataclass(frozen=True)
class Report:
    id: str
    lhs: NumericResult | None
    rhs: NumericResult | None
    verdict: Verdict
    expect: Tag
    ms: float

    @property
    def match(self) -> bool:
        return self.verdict.tag == self.expect


@dataclass(frozen=True)
class Summary:
    by_verdict: dict[str, int] = field(default_factory=dict)
    matched: int = 0
    mismatched: int = 0

    @property
    def all_match(self) -> bool:
        return self.mismatched == 0


# ------------------------------------------------------------------ loading


class CorpusError(TableVerifyError, ValueError):
    """Malformed corpus text; ``index`` is the 0-based record number."""

    def __init__(self, message: str, index: int, span: ex.SourceSpan):
        super().__init__(f"record {index}: {message} (bytes {span.start}..{span.end})")
        self.message = message
        self.index = index
        self.span = span


_KEYS = ("id", "lhs", "rhs", "expect", "note")
_LINE_RE = re.compile(r'^(?P<key>[a-z]+)\s*=\s*"(?P<value>.*)"\s*$')


def load_corpus(text: str) -> list[IdentityRecord]:
    """Parse corpus text into records, in file order."""
    records: list[IdentityRecord] = []
    seen: set[str] = set()
    current: dict[str, tuple[str, int]] | None = None  # key -> (value, byte offset)
    header = ex.SourceSpan(0, 0)
    offset = 0

    def finish() -> None:
        index = len(records)
        assert current is not None
        missing = [k for k in _KEYS if k not in current and k != "note"]
        if missing:
            raise CorpusError(f"missing key(s) {', '.join(missing)}", index, header)
        rid, rid_at = current["id"]
        if rid in seen:
            raise CorpusError(f"duplicate id {rid!r}", index, _span_at(rid_at, rid))
        seen.add(rid)
        expect_text, expect_at = current["expect"]
        try:
            expect = Tag(expect_text)
        except ValueError:
            expect = None
        if expect not in EXPECTABLE:
            raise CorpusError(f"unknown expect value {expect_text!r}", index,
                              _span_at(expect_at, expect_text))
        sides = []
        for key in ("lhs", "rhs"):
            value, at = current[key]
            try:
                sides.append(ex.parse(value))
            except ex.ParseError as exc:
                span = ex.SourceSpan(at + exc.span.start, at + exc.span.end)
                raise CorpusError(f"{key}: {exc.message}", index, span) from None
        records.append(IdentityRecord(rid, sides[0], sides[1], expect, current.get("note", ("",))[0]))

    for raw in text.split("\n"):
        line = raw.strip()
        line_span = ex.SourceSpan(offset, offset + len(raw.encode()))
        if line == "[entry]":
            if current is not None:
                finish()
            current = {}
            header = line_span
        elif line and not line.startswith("#"):
            m = _LINE_RE.match(line)
            if current is None or m is None:
                raise CorpusError(f"unexpected line {line!r}", len(records), line_span)
            key, value = m.group("key"), m.group("value")
            if key not in _KEYS:
                raise CorpusError(f"unknown key {key!r}", len(records), line_span)
            if key in current:
                raise CorpusError(f"repeated key {key!r}", len(records), line_span)
            lead = raw.index('"') + 1
            current[key] = (value, offset + len(raw[:lead].encode()))
        offset += len(raw.encode()) + 1
    if current is not None:
        finish()
    return records


def _span_at(at: int, value: str) -> ex.SourceSpan:
    return ex.SourceSpan(at, at + len(value.encode()))


def load_corpus_file(path: str | Path) -> list[IdentityRecord]:
    return load_corpus(Path(path).read_text(encoding="utf-8"))


def bundled_corpus_text() -> str:
    """Text of the integral-table corpus shipped with the package."""
    return resources.files("tableverify").joinpath("corpus/paper.ids").read_text(encoding="utf-8")


def bundled_corpus() -> list[IdentityRecord]:
    return load_corpus(bundled_corpus_text())


# --------------------------------------------------------------- evaluation


def _propagate(fn: Callable[..., float], args: list[NumericResult]) -> NumericResult:
    """Apply ``fn`` and push the argument errors through it by perturbation."""
    vals = [a.value for a in args]
    v = fn(*vals)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value {v!r}")
    err = 4.0 * _EPS * abs(v)
    for i, a in enumerate(args):
        if not a.err:
            continue
        worst = 0.0
        for step in (a.err, -a.err):
            shifted = list(vals)
            shifted[i] += step
            try:
                worst = max(worst, abs(fn(*shifted) - v))
            except (EvaluationError, ArithmeticError, ValueError):
                worst = math.inf
        err += worst
    if not math.isfinite(err):
        raise DomainError("error estimate blew up near a singularity")
    return NumericResult(v, err)


def evaluate(e: ex.Expression, opts: Options = DEFAULTS,
             bindings: Mapping[str, float] | None = None) -> NumericResult:
    """Numerically evaluate any expression, integrals and sums included.

    Errors of integral and sum nodes are carried through the surrounding
    arithmetic to first order.
    """
    env = dict(bindings or {})
    if isinstance(e, ex.Integral):
        return quad.integrate(quad.IntegralSpec.from_expression(e), opts.quad_tol, env)
    if isinstance(e, ex.Sum):
        spec = series.SeriesSpec.from_expression(e, env)
        return series.sum_series(spec, opts.series_tol, env)
    if not has_limits(e):
        v = ex.eval_closed(e, env)
        return NumericResult(v, 4.0 * _EPS * abs(v))
    if isinstance(e, ex.Neg):
        r = evaluate(e.child, opts, env)
        return NumericResult(-r.value, r.err, r.terms_used)
    if isinstance(e, ex.BinOp):
        args = [evaluate(e.left, opts, env), evaluate(e.right, opts, env)]
        out = _propagate(lambda a, b: ex.apply_binary(e.op, a, b), args)
    elif isinstance(e, ex.Call):
        args = [evaluate(a, opts, env) for a in e.args]
        out = _propagate(lambda *xs: ex.apply_function(e.name, *xs), args)
    else:
        raise TypeError(f"not an expression: {e!r}")
    return NumericResult(out.value, out.err, sum(a.terms_used for a in args))


def has_limits(e: ex.Expression) -> bool:
    if isinstance(e, (ex.Integral, ex.Sum)):
        return True
    if isinstance(e, ex.Neg):
        return has_limits(e.child)
    if isinstance(e, ex.BinOp):
        return has_limits(e.left) or has_limits(e.right)
    if isinstance(e, ex.Call):
        return any(has_limits(a) for a in e.args)
    return False


# ----------------------------------------------------------------- verdicts


def classify(lhs: NumericResult, rhs_value: float, opts: Options = DEFAULTS,
             rhs_err: float = 0.0) -> Verdict:
    """Compare a computed left side with the claimed right side.

    ``budget = lhs.err + rhs_err + abs_tol + rel_tol * |rhs|``.  Within the
    budget the identity is verified; a gap of at least ``refute_factor``
    budgets and at least ``refute_floor`` refutes it; anything between is
    inconclusive.
    """
    delta = abs(lhs.value - rhs_value)
    budget = lhs.err + rhs_err + opts.abs_tol + opts.rel_tol * abs(rhs_value)
    if delta <= budget:
        tag = Tag.VERIFIED
    elif delta >= opts.refute_factor * budget and delta >= opts.refute_floor:
        tag = Tag.REFUTED
    else:
        tag = Tag.INCONCLUSIVE
    return Verdict(tag, delta, budget)


def _divergence_route(lhs: ex.Expression, opts: Options):
    """For a half-infinite integral that failed the decay check."""
    if not (isinstance(lhs, ex.Integral) and isinstance(lhs.upper, ex.Const)
            and lhs.upper.name == "inf"):
        return None
    a = ex.eval_closed(lhs.lower)
    f = ex.bind_univariate(lhs.body, lhs.var)
    return quad.detect_divergence(f, a)


def verify_identity(r: IdentityRecord, opts: Options = DEFAULTS) -> Report:
    """Evaluate both sides of a record and classify; never raises."""
    t0 = time.perf_counter()
    lhs = rhs = None
    try:
        loose = ex.free_vars(r.lhs) | ex.free_vars(r.rhs)
        if loose:
            raise EvaluationError(f"unbound variable(s) {', '.join(sorted(loose))}")
        verdict = None
        try:
            lhs = evaluate(r.lhs, opts)
        except NoDecayError:
            outcome = _divergence_route(r.lhs, opts)
            if outcome is None:
                raise
            if isinstance(outcome, quad.Divergent):
                verdict = Verdict(Tag.DIVERGENT, message=outcome.diagnostic)
            elif isinstance(outcome, quad.ConvergesTo):
                lhs = outcome.result
            else:
                verdict = Verdict(Tag.INCONCLUSIVE, message=outcome.reason)
        rhs = evaluate(r.rhs, opts)
        if verdict is None:
            verdict = classify(lhs, rhs.value, opts, rhs.err)
    except (TableVerifyError, ArithmeticError, ValueError) as exc:
        verdict = Verdict(Tag.ERROR, message=f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - t0) * 1000.0
    return Report(r.id, lhs, rhs, verdict, r.expect, ms)


def summarize(reports: Iterable[Report]) -> Summary:
    reports = list(reports)
    counts = Counter(rep.verdict.tag.value for rep in reports)
    matched = sum(rep.match for rep in reports)
    by_verdict = {t.value: counts.get(t.value, 0) for t in Tag}
    return Summary(by_verdict, matched, len(reports) - matched)


def run_corpus(records: list[IdentityRecord], opts: Options = DEFAULTS,
               jobs: int = 1) -> tuple[list[Report], Summary]:
    """Verify every record; reports come back in corpus order."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1:
        reports = [verify_identity(r, opts) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda r: verify_identity(r, opts), records))
    return reports, summarize(reports)
