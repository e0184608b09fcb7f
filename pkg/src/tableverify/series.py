"""Summation of infinite series given by a closed-form summand.

Three engines:

* :func:`sum_direct` - partial sums with a geometric tail bound; only
  series that converge at least geometrically finish.
* :func:`sum_alternating` - Cohen/Rodriguez Villegas/Zagier acceleration.
* :func:`sum_condensed` - van Wijngaarden's rearrangement of a positive
  series into an alternating one, then accelerated.  This is what makes
  slow positive series such as ``sum 1/k^2`` or ``sum H_(n-1)/n^2``
  tractable in double precision.

:func:`sum_series` picks one from the series' sign hint.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping

from . import expr as ex
from . import quad
from .accel import DEFAULT_TERMS, cvz_error_scale, cvz_sum
from .numeric import ConvergenceError, EvaluationError, NumericResult

GENERAL = "general"
ALTERNATING = "alternating"
POSITIVE = "positive-decreasing"
HINTS = (GENERAL, ALTERNATING, POSITIVE)

#: number of leading terms inspected when guessing a sign pattern
PROBE_TERMS = 12
#: window over which the geometric tail ratio is measured
RATIO_WINDOW = 10
#: tail ratios at or above this are treated as sub-geometric
RATIO_CLAMP = 0.999
#: sum_series gives sum_direct this many terms before condensing
DIRECT_BUDGET = 2000

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SeriesSpec:
    """``sum_{var >= start} summand``; ``hint`` is one of :data:`HINTS`."""

    summand: ex.Expression
    var: str
    start: int
    hint: str = GENERAL

    def __post_init__(self) -> None:
        if self.hint not in HINTS:
            raise ValueError(f"unknown sign hint {self.hint!r}")

    @classmethod
    def from_expression(cls, node: ex.Sum, bindings: Mapping[str, float] | None = None,
                        hint: str | None = None) -> "SeriesSpec":
        start = ex.eval_closed(node.start, bindings)
        if start != math.floor(start):
            raise EvaluationError(f"series start index must be an integer, got {start!r}")
        spec = cls(node.body, node.var, int(start))
        if hint is None:
            hint = guess_hint(spec, bindings)
        return cls(node.body, node.var, int(start), hint)

    @classmethod
    def parse(cls, text: str, hint: str | None = None) -> "SeriesSpec":
        node = ex.parse(text)
        if not isinstance(node, ex.Sum):
            raise EvaluationError(f"not a series: {text!r}")
        return cls.from_expression(node, hint=hint)

    def term_function(self, bindings: Mapping[str, float] | None = None) -> Callable[[int], float]:
        f = ex.bind_univariate(self.summand, self.var, bindings)
        return lambda k: f(float(k))


def guess_hint(spec: SeriesSpec, bindings: Mapping[str, float] | None = None) -> str:
    """Sign pattern of the first :data:`PROBE_TERMS` terms (zeros are neutral)."""
    a = spec.term_function(bindings)
    signs = [math.copysign(1.0, v) for v in (a(spec.start + i) for i in range(PROBE_TERMS))
             if v != 0.0 and not math.isnan(v)]
    if len(signs) >= 2 and all(s1 == -s0 for s0, s1 in zip(signs, signs[1:])):
        return ALTERNATING
    if signs and all(s > 0 for s in signs):
        return POSITIVE
    return GENERAL


def _term(a: Callable[[int], float], k: int) -> float:
    v = a(k)
    if not math.isfinite(v):
        raise EvaluationError(f"non-finite series term at index {k}")
    return v


def sum_direct(spec: SeriesSpec, tol: float = 1e-15, max_terms: int = 10**6,
               bindings: Mapping[str, float] | None = None) -> NumericResult:
    """Add terms until a geometric tail bound drops to ``tol``.

    With ``r`` the largest ``|a_(k+1) / a_k|`` over the last ten terms, the
    tail after ``a_k`` is bounded by ``|a_k| r / (1 - r)``.  When
    ``r >= RATIO_CLAMP`` no bound is claimed and summation continues, so a
    series like ``sum 1/k^2`` ends in :class:`ConvergenceError`.
    """
    if spec.hint == ALTERNATING:
        raise ValueError("sum_direct does not take alternating series; use sum_alternating")
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = spec.term_function(bindings)
    terms: list[float] = []
    ratios: deque[float] = deque(maxlen=RATIO_WINDOW)
    bound = math.inf
    prev = None
    for i in range(max_terms):
        t = _term(a, spec.start + i)
        terms.append(t)
        if prev is not None:
            ratios.append(abs(t / prev) if prev else (0.0 if t == 0.0 else math.inf))
        prev = t
        if len(ratios) < RATIO_WINDOW:
            continue
        r = max(ratios)
        if r >= RATIO_CLAMP:
            continue
        bound = abs(t) * r / (1.0 - r)
        if bound <= tol:
            break
    else:
        raise ConvergenceError(
            f"series not converged after {max_terms} terms (tail bound {bound:.3g} > {tol:.3g})"
        )
    value = math.fsum(terms)
    rounding = _EPS * math.fsum(abs(t) for t in terms)
    return NumericResult(value, bound + rounding, len(terms))


def _accelerated(b: list[float], n_accel: int) -> tuple[float, float]:
    value = cvz_sum(lambda k: b[k], n_accel)
    scale = max(abs(v) for v in b)
    err = 3.0 * cvz_error_scale(n_accel) * abs(b[0]) + n_accel * _EPS * scale
    return value, err


def sum_alternating(spec: SeriesSpec, n_accel: int = DEFAULT_TERMS,
                    bindings: Mapping[str, float] | None = None) -> NumericResult:
    """Accelerated sum of an alternating series.

    The first ``n_accel`` terms must alternate in sign (zero terms are
    allowed anywhere) and their magnitudes must decrease over the second
    half of that prefix.
    """
    a = spec.term_function(bindings)
    terms = [_term(a, spec.start + i) for i in range(n_accel)]
    nonzero = [(i, t) for i, t in enumerate(terms) if t != 0.0]
    if not nonzero:
        return NumericResult(0.0, 0.0, n_accel)
    i0, t0 = nonzero[0]
    for i, t in nonzero:
        expected = math.copysign(1.0, t0) * (-1) ** (i - i0)
        if math.copysign(1.0, t) != expected:
            raise EvaluationError(f"sign pattern violated: term {spec.start + i} is {t!r}")
    mags = [abs(t) for t in terms]
    half = n_accel // 2
    if any(m1 >= m0 for m0, m1 in zip(mags[half:], mags[half + 1:])):
        raise EvaluationError("term magnitudes are not decreasing; not an alternating series")
    # b_k = (-1)^k a_k, so that sum a_k = sum (-1)^k b_k
    b = [t if i % 2 == 0 else -t for i, t in enumerate(terms)]
    value, err = _accelerated(b, n_accel)
    return NumericResult(value, err, n_accel)


def sum_condensed(spec: SeriesSpec, n_accel: int = DEFAULT_TERMS,
                  bindings: Mapping[str, float] | None = None) -> NumericResult:
    """Positive series via the van Wijngaarden transformation.

    ``sum_{i>=0} c_i = sum_{j>=0} (-1)^j B_j`` with
    ``B_j = sum_{m>=0} 2^m c_(2^m (j+1) - 1)``; each ``B_j`` converges
    geometrically and the outer alternating sum is accelerated.  The summand
    is sampled at indices up to about ``2**60``.
    """
    a = spec.term_function(bindings)
    blocks = []
    inner_err = 0.0
    evals = 0
    for j in range(n_accel):
        total = 0.0
        small = 0
        for m in range(1024):
            idx = (j + 1) * 2**m - 1
            v = a(spec.start + idx)
            evals += 1
            if not math.isfinite(v):
                raise EvaluationError(f"non-finite series term at index {spec.start + idx}")
            if v < 0:
                raise EvaluationError(f"negative term at index {spec.start + idx}; series not positive")
            term = 2.0**m * v
            total += term
            if term <= 1e-17 * total:
                small += 1
                if small == 3:
                    # geometric-at-worst decay of the block terms
                    inner_err += 2.0 * term
                    break
            else:
                small = 0
        else:
            raise ConvergenceError("condensed block did not converge; terms decay too slowly")
        blocks.append(total)
    mags_ok = all(b1 <= b0 for b0, b1 in zip(blocks[n_accel // 2:], blocks[n_accel // 2 + 1:]))
    if not mags_ok:
        raise ConvergenceError("condensed blocks are not decreasing")
    value, err = _accelerated(blocks, n_accel)
    return NumericResult(value, err + inner_err + 4 * _EPS * abs(value), evals)


def sum_series(spec: SeriesSpec, tol: float = 1e-15,
               bindings: Mapping[str, float] | None = None) -> NumericResult:
    """Dispatch on ``spec.hint``.

    Positive series first get :data:`DIRECT_BUDGET` terms of direct
    summation; if that does not reach ``tol`` they are condensed.
    """
    if spec.hint == ALTERNATING:
        return sum_alternating(spec, bindings=bindings)
    if spec.hint == POSITIVE:
        try:
            return sum_direct(spec, tol, DIRECT_BUDGET, bindings)
        except ConvergenceError:
            return sum_condensed(spec, bindings=bindings)
    return sum_direct(spec, tol, bindings=bindings)


def cauchy_square_weights(r: int) -> float:
    """``sum_{m=1}^{r-1} 1/((r-m) m)``, the coefficient of ``x^r`` in
    ``(sum x^n/n)^2``; equals ``2 H_(r-1) / r``."""
    if r < 2:
        raise ValueError("r must be >= 2")
    return math.fsum(1.0 / ((r - m) * m) for m in range(1, r))


def harmonic_weighted_sum(c: Callable[[int], float], alpha: float, f: Callable[[float], float],
                          tol: float = 1e-12) -> NumericResult:
    """``sum_{r>=1} c_r H_r alpha^r`` as ``int_0^1 (f(alpha) - f(alpha x)) / (1 - x) dx``.

    ``f`` must be the closed form of ``sum_{r>=1} c_r x^r``.  The pairing is
    spot-checked at ``x = 0.01`` against eight terms of the power series
    before integrating.
    """
    x0 = 0.01
    partial = math.fsum(c(r) * x0**r for r in range(1, 9))
    if not math.isclose(f(x0), partial, rel_tol=1e-9, abs_tol=1e-15):
        raise ValueError(f"f does not match its coefficients near 0: {f(x0)!r} vs {partial!r}")
    fa = f(alpha)

    def integrand(x: float) -> float:
        try:
            return (fa - f(alpha * x)) / (1.0 - x)
        except (ArithmeticError, ValueError):
            return math.nan

    return quad.integrate_finite(integrand, 0.0, 1.0, tol)
