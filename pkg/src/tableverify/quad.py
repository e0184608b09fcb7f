"""Double-exponential quadrature and a divergence classifier.

``integrate_finite`` is tanh-sinh on (a, b); ``integrate_half_infinite`` is
exp-sinh on (a, inf).  Both halve the step from h = 1 down to
``2**-max_level`` and stop when two successive levels agree to ``tol``.
Nodes are placed strictly inside the interval: abscissae are generated as
distances from the nearer endpoint so that they never round onto it.

How far the node rows extend on each side is fixed by the coarsest level:
a side ends when the next node would round onto the endpoint (or overflow
to infinity), or when two consecutive terms are negligible.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable

from . import expr as ex
from .numeric import (
    ConvergenceError,
    EvaluationError,
    NoDecayError,
    NumericResult,
    SingularityError,
)

Func = Callable[[float], float]

MAX_LEVEL = 12
MIN_LEVEL = 3
#: a term below this fraction of the largest term counts as negligible
NEGLIGIBLE = 1e-20
#: half-infinite decay check: |f| at the far nodes must be below this * max|f|
DECAY_RATIO = 1e-8

_HALF_PI = 0.5 * math.pi
_EPS = 2.220446049250313e-16


@dataclass
class _Side:
    """One half of a node row (t < 0 or t > 0)."""

    node: Callable[[float], tuple[float, float] | None]  # t -> (x, w) or None
    endpoint: float  # the end this side approaches (may be inf)
    tmax: float = 0.0
    cut: bool = False  # ended by touching the endpoint / overflow / bad sample
    edge_scale: float = 0.0  # max |f| over the outermost finite samples
    tail: float = 0.0  # truncation estimate when ``cut``
    far: list[tuple[float, float]] = field(default_factory=list)  # (x, f) in walk order


def _tanh_sinh_side(lo: float, hi: float, sign: int) -> Callable[[float], tuple[float, float] | None]:
    half = 0.5 * (hi - lo)

    def node(t: float):
        u = _HALF_PI * math.sinh(t)
        e = math.exp(-2.0 * u)
        d = half * 2.0 * e / (1.0 + e)  # distance from the endpoint
        w = half * _HALF_PI * math.cosh(t) * 4.0 * e / (1.0 + e) ** 2
        x = lo + d if sign < 0 else hi - d
        if not lo < x < hi:
            return None
        return x, w

    return node


def _exp_sinh_side(a: float, sign: int) -> Callable[[float], tuple[float, float] | None]:
    def node(t: float):
        s = _HALF_PI * math.sinh(t)
        if sign < 0:
            s = -s
        try:
            d = math.exp(s)
        except OverflowError:
            return None
        x = a + d
        if not (a < x < math.inf):
            return None
        w = _HALF_PI * math.cosh(t) * d
        if not math.isfinite(w):
            return None
        return x, w

    return node


def _reach(node, good: float, bad: float) -> float:
    """Largest t in [good, bad) (to ~1e-9) whose node is still placeable."""
    for _ in range(32):
        mid = 0.5 * (good + bad)
        if node(mid) is None:
            bad = mid
        else:
            good = mid
    return good


def _guarded(f: Func) -> Func:
    """Turn arithmetic exceptions raised by ``f`` into failed (nan) samples."""

    def g(x: float) -> float:
        try:
            return float(f(x))
        except (ArithmeticError, ValueError):
            return math.nan

    return g


class _Rule:
    """Level-doubling trapezoid sums over a two-sided double-exponential row."""

    def __init__(self, f: Func, center: tuple[float, float], left: _Side, right: _Side,
                 tol: float, far_side_open: bool):
        self.f = _guarded(f)
        self.center = center
        self.sides = (left, right)
        self.tol = tol
        self.far_side_open = far_side_open  # right side runs to +infinity
        self.evals = 0
        self.l1 = 0.0

    def sample(self, side: _Side, t: float, is_far: bool) -> float | None:
        """Weighted sample w*f at t, 0.0 for a tolerated endpoint failure,
        None if t lies beyond the side's reach."""
        xw = side.node(t)
        if xw is None:
            return None
        x, w = xw
        fx = self.f(x)
        self.evals += 1
        if math.isfinite(fx):
            return w * fx
        if w * side.edge_scale < self.tol / 10 and t > side.tmax - 1.0:
            return 0.0
        if is_far:
            raise NoDecayError(f"integrand is not finite at x={x!r} far out on the infinite side")
        raise SingularityError(f"non-finite integrand at interior node x={x!r}")

    def walk(self, side: _Side, is_far: bool, scale: float) -> float:
        """Level-0 walk t = 1, 2, ... fixing the side's extent; returns the sum."""
        total = 0.0
        small = 0
        recent: list[float] = []
        k = 0
        last_term = math.inf
        while True:
            k += 1
            t = float(k)
            xw = side.node(t)
            if xw is None:
                side.cut = small == 0
                if side.cut:
                    side.tmax = _reach(side.node, t - 1.0, t)
                break
            x, w = xw
            fx = self.f(x)
            self.evals += 1
            if not math.isfinite(fx):
                bound = w * max(recent[-4:], default=math.inf)
                if bound < self.tol / 10:
                    side.cut = True
                    side.tail = bound
                    break
                if is_far:
                    raise NoDecayError(f"integrand is not finite at x={x!r} on the infinite side")
                raise SingularityError(f"non-finite integrand near the endpoint at x={x!r}")
            recent.append(abs(fx))
            side.far.append((x, fx))
            term = w * fx
            total += term
            self.l1 += abs(term)
            side.tmax = t
            last_term = term
            scale = max(scale, abs(term))
            if abs(term) <= NEGLIGIBLE * scale:
                small += 1
                if small == 2:
                    break
            else:
                small = 0
        side.edge_scale = max(recent[-4:], default=0.0)
        if side.cut and not side.tail:
            if math.isfinite(side.endpoint):
                # beyond the reach the weights integrate to the remaining distance
                x_reach = side.node(side.tmax)[0] if side.tmax > 0 else side.endpoint
                side.tail = abs(side.endpoint - x_reach) * side.edge_scale
            else:
                side.tail = abs(last_term)
        return total

    def run(self, max_level: int) -> NumericResult:
        xc, wc = self.center
        fc = self.fc = self.f(xc)
        self.evals += 1
        if not math.isfinite(fc):
            raise SingularityError(f"non-finite integrand at interior node x={xc!r}")
        s0 = wc * fc
        self.l1 = abs(s0)
        left, right = self.sides
        s0 += self.walk(left, False, abs(s0))
        s0 += self.walk(right, self.far_side_open, abs(s0))
        if self.far_side_open:
            self._check_decay(right)

        estimate = s0  # h = 1
        err = math.inf
        level = 0
        for level in range(1, max_level + 1):
            h = 2.0**-level
            new = 0.0
            for side in self.sides:
                j = 1
                while True:
                    t = j * h
                    if t > side.tmax:
                        break
                    v = self.sample(side, t, self.far_side_open and side is right)
                    if v is None:
                        break
                    new += v
                    self.l1 += abs(v) * h
                    j += 2
            refined = 0.5 * estimate + h * new
            err = abs(refined - estimate)
            estimate = refined
            if level >= MIN_LEVEL and err <= self.tol:
                break
        tail = left.tail + right.tail
        total_err = err + tail + 4.0 * _EPS * self.l1
        if total_err > 100.0 * self.tol and err > self.tol:
            raise ConvergenceError(
                f"no-convergence: level {level} reached with error estimate {err:.3g}"
            )
        return NumericResult(estimate, total_err, self.evals)

    def _check_decay(self, right: _Side) -> None:
        # probe the three largest representable abscissae at which f can be
        # evaluated, not just the walked ones: the walk may stop early on
        # negligible terms.  Samples that fail (e.g. x**4 overflowing) are
        # skipped rather than read as growth.
        probes = []
        t = 1.0
        while right.node(t) is not None:
            probes.append(right.node(t)[0])
            t += 1.0
        scale = max([abs(self.fc)] + [abs(v) for _, v in right.far])
        checked = 0
        for x in reversed(probes):
            fx = self.f(x)
            self.evals += 1
            if math.isnan(fx):
                continue
            if not abs(fx) < DECAY_RATIO * scale:
                raise NoDecayError(f"integrand does not decay: f({x:.3g}) = {fx!r}")
            checked += 1
            if checked == 3:
                break
        if checked < 3:
            raise NoDecayError("integrand could not be evaluated far enough out to check decay")
        if right.cut and right.tail > self.tol:
            raise NoDecayError("weighted integrand terms never became negligible on the infinite side")


def integrate_finite(f: Func, a: float, b: float, tol: float = 1e-12,
                     max_level: int = MAX_LEVEL) -> NumericResult:
    """tanh-sinh quadrature of ``f`` over the finite interval (a, b).

    ``f`` returns ``nan`` for a failed sample.  Failures are tolerated only
    in the endpoint clusters, where the double-exponential weights make
    their contribution provably negligible.

    Raises
    ------
    ConvergenceError
        level cap reached with error above ``100 * tol`` ("no-convergence").
    SingularityError
        non-finite sample at an interior node.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_finite needs finite bounds")
    if not a < b:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    rule = _Rule(
        f,
        (0.5 * (a + b), 0.5 * (b - a) * _HALF_PI),
        _Side(_tanh_sinh_side(a, b, -1), a),
        _Side(_tanh_sinh_side(a, b, +1), b),
        tol,
        far_side_open=False,
    )
    return rule.run(max_level)


def integrate_half_infinite(f: Func, a: float, tol: float = 1e-12,
                            max_level: int = MAX_LEVEL) -> NumericResult:
    """exp-sinh quadrature of ``f`` over (a, inf).

    Raises :class:`NoDecayError` when ``|f|`` at the three largest nodes is
    not below ``DECAY_RATIO`` times the largest sample, or when the weighted
    terms never become negligible before the abscissae overflow.
    """
    if not math.isfinite(a):
        raise ValueError("lower bound must be finite")
    rule = _Rule(
        f,
        (a + 1.0, _HALF_PI),
        _Side(_exp_sinh_side(a, -1), a),
        _Side(_exp_sinh_side(a, +1), math.inf),
        tol,
        far_side_open=True,
    )
    return rule.run(max_level)


# ------------------------------------------------- expression-level entry


@dataclass(frozen=True)
class IntegralSpec:
    """An integral over ``var`` from ``lower`` to ``upper`` (may be ``inf``)."""

    integrand: ex.Expression
    var: str
    lower: ex.Expression
    upper: ex.Expression

    @classmethod
    def from_expression(cls, node: ex.Integral) -> "IntegralSpec":
        return cls(node.body, node.var, node.lower, node.upper)

    @classmethod
    def parse(cls, text: str) -> "IntegralSpec":
        node = ex.parse(text)
        if not isinstance(node, ex.Integral):
            raise EvaluationError(f"not an integral: {text!r}")
        return cls.from_expression(node)


def _bound(e: ex.Expression, env) -> float:
    if isinstance(e, ex.Const) and e.name == "inf":
        return math.inf
    if isinstance(e, ex.Neg) and isinstance(e.child, ex.Const) and e.child.name == "inf":
        return -math.inf
    return ex.eval_closed(e, env)


def integrate(spec: IntegralSpec, tol: float = 1e-12, bindings=None,
              max_level: int = MAX_LEVEL) -> NumericResult:
    """Evaluate the bounds, then dispatch on their finiteness.

    ``bindings`` fixes any outer variables the integrand mentions.
    """
    env = dict(bindings or {})
    a = _bound(spec.lower, env)
    b = _bound(spec.upper, env)
    f = ex.bind_univariate(spec.integrand, spec.var, env)
    if a == b:
        return NumericResult(0.0, 0.0, 0)
    if a > b:
        raise EvaluationError(f"lower bound {a!r} exceeds upper bound {b!r}")
    if math.isfinite(a) and math.isfinite(b):
        return integrate_finite(f, a, b, tol, max_level)
    if math.isfinite(a):
        return integrate_half_infinite(f, a, tol, max_level)
    if math.isfinite(b):
        return integrate_half_infinite(lambda x: f(-x), -b, tol, max_level)
    pos = integrate_half_infinite(f, 0.0, tol, max_level)
    neg = integrate_half_infinite(lambda x: f(-x), 0.0, tol, max_level)
    return NumericResult(pos.value + neg.value, pos.err + neg.err,
                         pos.terms_used + neg.terms_used)


# -------------------------------------------------------------- divergence

#: windows [a + 2**(j-1), a + 2**j] for j = 0 .. WINDOW_COUNT - 1 (first starts at a)
WINDOW_COUNT = 8
WINDOW_TOL = 1e-9
#: every window is cut into at least this many panels before adaptive bisection
MIN_PANELS = 64
PANEL_LEVEL = 6
PANEL_TOL_FLOOR = 1e-13
MAX_BISECTIONS = 14
TREND_WINDOWS = 6
#: divergent needs a recent window oscillation above this ...
DIVERGENCE_FLOOR = 1e-3
#: ... and a log-magnitude trend per window no steeper than this (convergent
#: tails shrink by at least ln 2 per doubling window)
TREND_SLOPE_MIN = -0.05
CONVERGED_TAIL = 1e-6


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float
    integral: float
    err: float
    magnitude: float  # max - min of the running integral over the window


@dataclass(frozen=True)
class ConvergesTo:
    result: NumericResult
    windows: tuple[Window, ...]


@dataclass(frozen=True)
class Divergent:
    windows: tuple[Window, ...]
    slope: float

    @property
    def diagnostic(self) -> str:
        mags = ", ".join(f"{w.magnitude:.3g}" for w in self.windows[-TREND_WINDOWS:])
        return f"window oscillation does not decay (last magnitudes {mags}; slope {self.slope:+.3g})"


@dataclass(frozen=True)
class Unknown:
    windows: tuple[Window, ...]
    reason: str


def _panel(f: Func, lo: float, hi: float, tol: float, depth: int,
           out: list[tuple[float, float, float]]) -> None:
    try:
        r = integrate_finite(f, lo, hi, tol, PANEL_LEVEL)
        out.append((hi, r.value, r.err))
        return
    except SingularityError:
        raise
    except ConvergenceError:
        pass
    if depth >= MAX_BISECTIONS:
        raise ConvergenceError(f"window panel [{lo!r}, {hi!r}] did not converge")
    mid = 0.5 * (lo + hi)
    tol = max(tol / 2, PANEL_TOL_FLOOR)
    _panel(f, lo, mid, tol, depth + 1, out)
    _panel(f, mid, hi, tol, depth + 1, out)


def _window(f: Func, lo: float, hi: float, start_value: float) -> Window:
    pieces: list[tuple[float, float, float]] = []
    width = (hi - lo) / MIN_PANELS
    for i in range(MIN_PANELS):
        p_lo = lo + i * width
        p_hi = hi if i == MIN_PANELS - 1 else lo + (i + 1) * width
        _panel(f, p_lo, p_hi, WINDOW_TOL / MIN_PANELS, 0, pieces)
    running = start_value
    top = bottom = running
    total = err = 0.0
    for _, value, e in pieces:
        running += value
        total += value
        err += e
        top = max(top, running)
        bottom = min(bottom, running)
    return Window(lo, hi, total, err, top - bottom)


def _log_slope(values: list[float]) -> float:
    logs = [math.log(max(v, 1e-300)) for v in values]
    return statistics.linear_regression(range(len(logs)), logs).slope


def detect_divergence(f: Func, a: float):
    """Classify ``int_a^inf f`` as ConvergesTo, Divergent or Unknown.

    The range is cut into doubling windows and, for each, the oscillation
    (max - min) of the running integral is measured.  A convergent integral
    has shrinking oscillation; a divergent one keeps it above
    ``DIVERGENCE_FLOOR`` with no downward trend.  Conditionally convergent
    oscillatory integrals with slow decay usually land in ``Unknown``.
    """
    windows: list[Window] = []
    running = 0.0
    prev = 0.0
    try:
        for j in range(WINDOW_COUNT):
            hi = float(2**j)
            w = _window(f, a + prev, a + hi, running)
            running += w.integral
            windows.append(w)
            prev = hi
    except (ConvergenceError, EvaluationError) as exc:
        return Unknown(tuple(windows), f"window integration failed: {exc}")
    mags = [w.magnitude for w in windows[-TREND_WINDOWS:]]
    slope = _log_slope(mags)
    if max(mags) > DIVERGENCE_FLOOR and slope >= TREND_SLOPE_MIN:
        return Divergent(tuple(windows), slope)
    last, before = mags[-1], mags[-2]
    if last == 0.0:
        tail = 0.0
    elif last < before:
        r = last / before
        tail = last * r / (1.0 - r)
    else:
        tail = math.inf
    decaying = all(m2 <= m1 for m1, m2 in zip(mags, mags[1:]))
    if decaying and tail <= CONVERGED_TAIL:
        err = tail + sum(w.err for w in windows)
        result = NumericResult(running, err, 0)
        return ConvergesTo(result, tuple(windows))
    return Unknown(tuple(windows), f"tail oscillation {last:.3g}, slope {slope:+.3g}")


# ------------------------------------------------- quartic family helpers


def quartic_integral(a: float, m: int, tol: float = 1e-12) -> NumericResult:
    """``N(a; m) = int_0^inf dx / (x^4 + 2 a x^2 + 1)^(m+1)`` for ``a > -1``.

    At ``m = 0`` this equals ``pi / (2 sqrt(2 (a + 1)))``.
    """
    if not a > -1.0:
        raise ValueError("need a > -1")
    if m < 0:
        raise ValueError("need m >= 0")
    p = m + 1

    def f(x: float) -> float:
        x2 = x * x
        return (x2 * x2 + 2.0 * a * x2 + 1.0) ** -p

    return integrate_half_infinite(f, 0.0, tol)


def double_sqrt_terms(a: float, c: float, count: int, tol: float = 1e-13) -> list[float]:
    """First ``count`` terms of the expansion of ``sqrt(a + sqrt(1 + c))``
    around ``c = 0``, beyond the constant ``sqrt(a + 1)``::

        (1 / (pi sqrt 2)) (-1)^(k-1) / k * N(a; k-1) c^k,   k = 1 .. count
    """
    scale = 1.0 / (math.pi * math.sqrt(2.0))
    return [scale * (-1) ** (k - 1) / k * quartic_integral(a, k - 1, tol).value * c**k
            for k in range(1, count + 1)]


def double_sqrt_truncation(a: float, c: float, K: int) -> tuple[float, float]:
    """``(|remainder after K terms|, |term K+1|)`` of the double-square-root
    expansion; for an alternating expansion with shrinking terms the first
    is bounded by the second."""
    terms = double_sqrt_terms(a, c, K + 1)
    exact = math.sqrt(a + math.sqrt(1.0 + c))
    partial = math.sqrt(a + 1.0) + math.fsum(terms[:K])
    return abs(exact - partial), abs(terms[K])
