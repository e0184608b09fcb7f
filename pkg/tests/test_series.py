import math
import random

import mpmath
import pytest

from tableverify import series as sr
from tableverify import specfun
from tableverify.numeric import ConvergenceError, EvaluationError

LN2 = math.log(2)


def spec(text, hint=None):
    return sr.SeriesSpec.parse(text, hint)


def test_hint_guessing():
    assert spec("sum(k, 1, (-1)^(k - 1) / k^2)").hint == sr.ALTERNATING
    assert spec("sum(k, 1, 1 / k^2)").hint == sr.POSITIVE
    assert spec("sum(k, 1, sin(k) / k^2)").hint == sr.GENERAL
    with pytest.raises(ValueError):
        sr.SeriesSpec(spec("sum(k, 1, 1/k^2)").summand, "k", 1, "wiggly")


def test_sum_direct_log_series():
    r = sr.sum_direct(spec("sum(k, 1, exp(-k * ln(2)) / k)"), 1e-15)
    assert abs(r.value - LN2) <= 1e-15
    assert abs(r.value - LN2) <= 10 * r.err


def test_sum_direct_dilog_half():
    r = sr.sum_direct(spec("sum(k, 1, 1 / (2^(k - 1) * k^2))"), 1e-15)
    exact = math.pi**2 / 6 - LN2**2
    assert abs(r.value - exact) <= 1e-14
    assert abs(r.value - 1.1644810529300252) <= 1e-14


def test_sum_direct_refuses_slow_series():
    with pytest.raises(ConvergenceError):
        sr.sum_direct(spec("sum(k, 1, 1 / k^2)"), 1e-12, max_terms=10**6)


def test_sum_direct_rejects_alternating_hint():
    with pytest.raises(ValueError):
        sr.sum_direct(spec("sum(k, 1, (-1)^k / k)"), 1e-12)


def test_non_finite_term():
    with pytest.raises(EvaluationError):
        sr.sum_direct(spec("sum(k, 0, 1 / k^2)", sr.POSITIVE), 1e-12)


def test_sum_alternating():
    r = sr.sum_alternating(spec("sum(k, 1, (-1)^(k - 1) / k^2)"))
    assert abs(r.value - math.pi**2 / 12) <= 1e-15
    r = sr.sum_alternating(spec("sum(k, 0, (-1)^k / sqrt(2 * k + 1))"))
    assert abs(r.value - 0.6676914571896091) <= 1e-15
    oracle = mpmath.nsum(lambda k: (-1) ** k / mpmath.sqrt(2 * k + 1), [0, mpmath.inf])
    assert abs(r.value - float(oracle)) <= 10 * r.err


def test_sum_alternating_rejects_non_decreasing():
    with pytest.raises(EvaluationError):
        sr.sum_alternating(spec("sum(k, 0, (-1)^k)", sr.ALTERNATING))
    with pytest.raises(EvaluationError):
        sr.sum_alternating(spec("sum(k, 1, 1 / k)", sr.ALTERNATING))


@pytest.mark.parametrize("text", [
    "sum(k, 1, (-1)^(k - 1) / k^2)",
    "sum(k, 0, (-1)^k / sqrt(2 * k + 1))",
    "sum(k, 0, (-1)^k * ln(2 * k + 1) / (2 * k + 1))",
])
def test_acceleration_consistency(text):
    a = sr.sum_alternating(spec(text), 30).value
    b = sr.sum_alternating(spec(text), 40).value
    assert abs(a - b) <= 1e-11


@pytest.mark.parametrize("text, exact", [
    ("sum(k, 1, 1 / k^2)", math.pi**2 / 6),
    ("sum(n, 1, harmonic(n - 1) / n^2)", 1.2020569031595942),
    ("sum(k, 1, 1 / k^3)", 1.2020569031595942),
    ("sum(k, 1, 1 / (k * (k + 1)))", 1.0),
])
def test_condensed(text, exact):
    r = sr.sum_series(spec(text))
    assert abs(r.value - exact) <= 10 * r.err
    assert r.err <= 1e-12


@pytest.mark.parametrize("text, exact", [
    ("sum(k, 1, exp(-k) / k)", -math.log(1 - math.exp(-1))),
    ("sum(k, 1, exp(-3 * k) / k^2)", specfun.dilog(math.exp(-3))),
    ("sum(k, 1, 1 / (2^(k - 1) * k^2))", math.pi**2 / 6 - LN2**2),
    ("sum(r, 1, harmonic(r) / (r * 2^(r - 1)))", math.pi**2 / 6),
])
def test_tail_bound_soundness(text, exact):
    r = sr.sum_series(spec(text))
    assert abs(r.value - exact) <= max(10 * r.err, 1e-15)


def test_cauchy_square_weights():
    assert sr.cauchy_square_weights(2) == 1.0
    assert sr.cauchy_square_weights(4) == pytest.approx(11 / 12, rel=1e-15)
    assert abs(sr.cauchy_square_weights(10) - 2 * specfun.harmonic(9) / 10) <= 1e-14
    with pytest.raises(ValueError):
        sr.cauchy_square_weights(1)


def test_cauchy_square_gives_ln2_squared():
    s = math.fsum(sr.cauchy_square_weights(r) / 2**r for r in range(2, 201))
    assert abs(s - LN2**2) <= 1e-12
    s = math.fsum(specfun.harmonic(r - 1) / (r * 2 ** (r - 1)) for r in range(1, 201))
    assert abs(s - LN2**2) <= 1e-12


def test_merge_identity():
    a = math.fsum(1 / (2 ** (k - 1) * k * k) for k in range(1, 201))
    b = math.fsum(specfun.harmonic(r) / (r * 2 ** (r - 1)) for r in range(1, 201))
    assert abs(LN2**2 + a - b) <= 1e-12


def test_harmonic_transform_full_circle():
    r = sr.harmonic_weighted_sum(lambda r: 1 / (r * 2 ** (r - 1)), 1.0,
                                 lambda x: -2 * math.log1p(-x / 2))
    assert abs(r.value - math.pi**2 / 6) <= 1e-12


def test_harmonic_transform_single_term():
    r = sr.harmonic_weighted_sum(lambda r: 1.0 if r == 1 else 0.0, 0.5, lambda x: x)
    assert abs(r.value - 0.5) <= 1e-14


def test_harmonic_transform_euler_sum():
    r = sr.harmonic_weighted_sum(lambda r: 1 / r**2, 1.0, specfun.dilog)
    assert abs((r.value - specfun.zeta(3)) - 1.2020569032) <= 1e-10


def test_harmonic_transform_checks_pairing():
    with pytest.raises(ValueError):
        sr.harmonic_weighted_sum(lambda r: 1 / r, 0.5, lambda x: x)


def test_harmonic_transform_random_geometric():
    rng = random.Random(7)
    for _ in range(20):
        rho = rng.uniform(0.0, 0.9)
        direct = math.fsum(rho**r / r * specfun.harmonic(r) for r in range(1, 10**4))
        r = sr.harmonic_weighted_sum(lambda r: rho**r / r, 1.0, lambda x: -math.log1p(-rho * x))
        assert abs(r.value - direct) <= r.err + 1e-13


@pytest.mark.parametrize("r", [1, 2, 5, 17])
def test_harmonic_number_integral(r):
    from tableverify import quad
    res = quad.integrate_finite(lambda x: math.fsum(x**j for j in range(r)), 0.0, 1.0)
    assert abs(res.value - specfun.harmonic(r)) <= 1e-12
