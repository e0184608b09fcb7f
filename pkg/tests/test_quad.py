import math

import mpmath
import pytest
from scipy.special import fresnel

from tableverify import expr as ex
from tableverify import quad, specfun
from tableverify.numeric import ConvergenceError, NoDecayError, SingularityError

PI2_12 = math.pi**2 / 12

# corpus-style integrals with known closed forms
CLOSED_FORMS = [
    ("integral(x, 0, 1, ln(1 + x) / x)", PI2_12),
    ("integral(x, 0, ln(2), x / (1 - exp(-x)))", PI2_12),
    ("integral(x, pi / 4, pi / 2, ln(ln(tan(x))))",
     (math.pi / 2) * math.log(math.sqrt(2 * math.pi) * specfun.gamma(0.75) / specfun.gamma(0.25))),
    ("integral(x, 0, inf, 1 / cosh(x)^2)", 1.0),
    ("integral(x, 0, inf, 1 / cosh(x^2))", math.sqrt(math.pi) * specfun.dbeta(0.5)),
    ("integral(t, 0, inf, 1 / ((exp(t) + exp(-t)) * sqrt(t)))", math.sqrt(math.pi) * specfun.dbeta(0.5)),
    ("integral(x, 0, inf, 1 / (x^4 + 2 * x^2 + 1))", math.pi / 4),
    ("integral(x, 0, inf, x^2 / (exp(2 * x) - 1))", 2 * specfun.zeta(3) / 8),
    ("integral(x, 0, 1, (2 * ln(2) + 2 * ln(1 - x / 2)) / (1 - x))", math.pi**2 / 6),
    ("integral(x, -inf, inf, exp(-x^2))", math.sqrt(math.pi)),
    ("integral(x, -inf, 0, exp(x))", 1.0),
]


@pytest.mark.parametrize("text, exact", CLOSED_FORMS)
def test_error_estimate_is_sound(text, exact):
    r = quad.integrate(quad.IntegralSpec.parse(text))
    assert abs(r.value - exact) <= 10 * r.err
    assert r.err <= 1e-11


def test_finite_examples():
    r = quad.integrate_finite(lambda x: math.log1p(x) / x, 0.0, 1.0)
    assert abs(r.value - PI2_12) <= 1e-12
    r = quad.integrate_finite(lambda x: x / -math.expm1(-x), 0.0, math.log(2))
    assert abs(r.value - PI2_12) <= 1e-12


def test_nodes_never_touch_the_endpoints():
    seen = []

    def f(x):
        seen.append(x)
        return 1.0 / math.sqrt(x) - math.log(1.0 - x)

    r = quad.integrate_finite(f, 0.0, 1.0)
    assert 0.0 < min(seen) and max(seen) < 1.0
    assert abs(r.value - 3.0) <= 1e-11


def test_log_log_endpoint():
    f = ex.bind_univariate(ex.parse("ln(ln(tan(x)))"), "x")
    r = quad.integrate_finite(f, math.pi / 4, math.pi / 2)
    assert round(r.value, 5) == -0.26044


def test_half_infinite_examples():
    sech2 = lambda x: 4 * math.exp(-2 * x) / (1 + math.exp(-2 * x)) ** 2  # noqa: E731
    assert abs(quad.integrate_half_infinite(sech2, 0.0).value - 1) <= 1e-12
    r = quad.integrate_half_infinite(lambda x: 1 / (x**4 + 2 * x**2 + 1), 0.0)
    assert abs(r.value - math.pi / 4) <= 1e-12
    f = ex.bind_univariate(ex.parse("x^(nu - 1) / (exp(mu * x) - 1)"), "x", {"nu": 3.0, "mu": 2.0})
    r = quad.integrate_half_infinite(f, 0.0)
    assert abs(r.value - specfun.gamma(3) * specfun.zeta(3) / 2**3) <= 1e-12


def test_interior_singularity():
    with pytest.raises(SingularityError):
        quad.integrate_finite(lambda x: 1.0 / (x - 0.5), 0.0, 1.0)


def test_no_decay():
    with pytest.raises(NoDecayError):
        quad.integrate_half_infinite(math.sin, 0.0)
    with pytest.raises(NoDecayError):
        quad.integrate_half_infinite(lambda x: 1.0 / (1.0 + math.sqrt(x)), 0.0)


def test_bad_interval():
    with pytest.raises(ValueError):
        quad.integrate_finite(math.exp, 1.0, 0.0)
    assert quad.integrate(quad.IntegralSpec.parse("integral(x, 1, 1, x)")).value == 0.0


def test_no_convergence():
    # wildly oscillating integrand; the level cap is reached
    with pytest.raises(ConvergenceError):
        quad.integrate_finite(lambda x: math.sin(1e4 * x), 0.0, 1.0, 1e-14, max_level=5)


@pytest.mark.parametrize("text", [t for t, _ in CLOSED_FORMS[:6]])
def test_err_non_increasing_in_level_cap(text):
    spec = quad.IntegralSpec.parse(text)
    errs = []
    for cap in range(quad.MIN_LEVEL, quad.MAX_LEVEL + 1):
        try:
            errs.append(quad.integrate(spec, max_level=cap).err)
        except ConvergenceError:
            assert not errs, "a higher cap failed after a lower one succeeded"
    assert errs
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_bound_expression_bit_for_bit():
    a = quad.integrate(quad.IntegralSpec.parse("integral(x, 0, ln(2), x / (1 - exp(-x)))"))
    b = quad.integrate(quad.IntegralSpec.parse("integral(x, 0, 0.6931471805599453, x / (1 - exp(-x)))"))
    assert a.value == b.value


def test_dispatch():
    spec = quad.IntegralSpec.parse("integral(x, pi / 4, pi / 2, sin(x))")
    assert abs(quad.integrate(spec).value - math.cos(math.pi / 4)) <= 1e-14


# ----------------------------------------------------------- quartic helpers


@pytest.mark.parametrize("a", [0.0, 1.0, 2.0, -0.5, 10.0])
def test_quartic_m0(a):
    assert abs(quad.quartic_integral(a, 0).value - math.pi / (2 * math.sqrt(2 * (a + 1)))) <= 1e-12


def test_quartic_higher_m_against_mpmath():
    for a, m in ((1.0, 1), (1.0, 3), (0.5, 2)):
        oracle = mpmath.quad(lambda x: (x**4 + 2 * a * x**2 + 1) ** -(m + 1), [0, 1, mpmath.inf])
        assert abs(quad.quartic_integral(a, m).value - float(oracle)) <= 1e-12


@pytest.mark.parametrize("K", range(2, 7))
def test_double_sqrt_truncation(K):
    remainder, next_term = quad.double_sqrt_truncation(1.0, 0.1, K)
    assert remainder <= next_term


# ---------------------------------------------------------------- divergence


def _fresnel_cos(u):
    s, c = fresnel(u * math.sqrt(2 / math.pi))
    return math.sqrt(math.pi / 2) * c


def _fresnel_sin(u):
    s, c = fresnel(u * math.sqrt(2 / math.pi))
    return math.sqrt(math.pi / 2) * s


def _antiderivative(X):
    """int_0^X x sin(x^2) sin(2x) dx in closed form (Fresnel integrals).

    By parts: -cos(X^2) sin(2X) / 2 + int_0^X cos(x^2) cos(2x) dx, and the
    last integral splits into cos((x +- 1)^2 - 1) pieces.
    """
    g = 0.0
    for s in (1.0, -1.0):
        g += math.cos(1) * (_fresnel_cos(X + s) - _fresnel_cos(s))
        g += math.sin(1) * (_fresnel_sin(X + s) - _fresnel_sin(s))
    return -0.5 * math.cos(X * X) * math.sin(2 * X) + 0.5 * g


def test_divergent_entry():
    f = ex.bind_univariate(ex.parse("x * sin(x^2) * sin(2 * x)"), "x")
    out = quad.detect_divergence(f, 0.0)
    assert isinstance(out, quad.Divergent)
    assert out.slope >= 0
    assert max(w.magnitude for w in out.windows[-quad.TREND_WINDOWS:]) > quad.DIVERGENCE_FLOOR
    for w in out.windows:
        exact = _antiderivative(w.hi) - _antiderivative(w.lo)
        assert abs(w.integral - exact) <= 1e-8


def test_convergent_integrand():
    out = quad.detect_divergence(ex.bind_univariate(ex.parse("1 / cosh(x)^2"), "x"), 0.0)
    assert isinstance(out, quad.ConvergesTo)
    assert abs(out.result.value - 1.0) <= 1e-6


def test_conditionally_convergent_is_not_divergent():
    out = quad.detect_divergence(lambda x: math.sin(x) / x if x else 1.0, 0.0)
    assert not isinstance(out, quad.Divergent)
