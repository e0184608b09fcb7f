import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tableverify import expr as ex
from tableverify.numeric import DomainError, EvaluationError


def test_parse_pi_squared_over_12():
    e = ex.parse("pi^2/12")
    assert e == ex.Div(ex.Pow(ex.Const("pi"), ex.Number(2.0)), ex.Number(12.0))


def test_entry_integrand_has_free_x():
    e = ex.parse("x / (1 - exp(-x))")
    assert ex.free_vars(e) == {"x"}


def test_truncated_call_error_spans_the_call():
    with pytest.raises(ex.ParseError) as info:
        ex.parse("zeta(2,")
    assert info.value.span == ex.SourceSpan(0, 7)


@pytest.mark.parametrize("text", ["foo(1)", "zeta(1, 2)", "sin()", "1 +", "(1", "1 2", "2 $ 3"])
def test_rejects_bad_input(text):
    with pytest.raises(ex.ParseError) as info:
        ex.parse(text)
    span = info.value.span
    assert 0 <= span.start <= span.end <= len(text.encode())


def test_span_counts_bytes_not_characters():
    text = "1 + é"  # 'é' is two bytes in UTF-8
    with pytest.raises(ex.ParseError) as info:
        ex.parse(text)
    assert info.value.span.end <= len(text.encode())
    assert info.value.span.start == 4


def test_precedence():
    assert ex.parse("a-b-c") == ex.Sub(ex.Sub(ex.Var("a"), ex.Var("b")), ex.Var("c"))
    assert ex.eval_closed(ex.parse("2^3^2")) == 512.0
    assert ex.eval_closed(ex.parse("-x^2"), {"x": 3.0}) == -9.0
    assert ex.eval_closed(ex.parse("2*-3")) == -6.0
    assert ex.eval_closed(ex.parse("2^-1")) == 0.5


@pytest.mark.parametrize("e, text", [
    (ex.Pow(ex.Const("pi"), ex.Number(2.0)), "pi^2"),
    (ex.Neg(ex.Var("x")), "-x"),
    (ex.Div(ex.Number(1.0), ex.Add(ex.Var("x"), ex.Number(1.0))), "1/(x + 1)"),
    (ex.Sub(ex.Var("a"), ex.Sub(ex.Var("b"), ex.Var("c"))), "a - (b - c)"),
    (ex.Pow(ex.Pow(ex.Var("a"), ex.Var("b")), ex.Var("c")), "(a^b)^c"),
    (ex.Neg(ex.Pow(ex.Var("x"), ex.Number(2.0))), "-x^2"),
    (ex.Pow(ex.Neg(ex.Var("x")), ex.Number(2.0)), "(-x)^2"),
])
def test_format(e, text):
    assert ex.format(e) == text
    assert ex.parse(text) == e


def test_eval_pi_squared_over_12():
    assert ex.eval_closed(ex.parse("pi^2/12")) == pytest.approx(float(mpmath.pi**2 / 12), abs=1e-16)


def test_eval_gamma_ratio_against_mpmath():
    v = ex.eval_closed(ex.parse("sqrt(2*pi)*gamma(3/4)/gamma(1/4)"))
    oracle = mpmath.sqrt(2 * mpmath.pi) * mpmath.gamma(0.75) / mpmath.gamma(0.25)
    assert v == pytest.approx(float(oracle), rel=1e-13)


@pytest.mark.parametrize("text, env", [
    ("ln(1-x)", {"x": 1.0}),
    ("ln(-1)", {}),
    ("sqrt(-2)", {}),
    ("atanh(1)", {}),
    ("gamma(0)", {}),
    ("zeta(1)", {}),
    ("1/0", {}),
    ("dilog(2)", {}),
    ("harmonic(1.5)", {}),
])
def test_domain_errors(text, env):
    with pytest.raises(DomainError):
        ex.eval_closed(ex.parse(text), env)


def test_unbound_variable_and_inf_in_arithmetic():
    with pytest.raises(EvaluationError):
        ex.eval_closed(ex.parse("x + 1"))
    with pytest.raises(EvaluationError):
        ex.eval_closed(ex.parse("inf - 1"))
    with pytest.raises(EvaluationError):
        ex.eval_closed(ex.parse("integral(x, 0, 1, x)"))


def test_eval_is_deterministic():
    e = ex.parse("dbeta_prime(1) + zeta(3) * dilog(0.3) - lngamma(7.5)")
    assert ex.eval_closed(e) == ex.eval_closed(e)


def test_bind_univariate():
    f = ex.bind_univariate(ex.parse("x/(1-exp(-x))"), "x")
    assert f(math.log(2)) == pytest.approx(2 * math.log(2), rel=1e-15)
    assert ex.bind_univariate(ex.parse("1/cosh(x^2)"), "x")(0.0) == 1.0
    g = ex.bind_univariate(ex.parse("ln(ln(tan(x)))"), "x")
    assert math.isnan(g(math.pi / 4))


def test_bind_univariate_matches_eval_closed():
    e = ex.parse("x^3 - 2*sinh(x) / (1 + x^2) + abs(cos(x))^0.5")
    f = ex.bind_univariate(e, "x")
    for x in (-2.5, -0.1, 0.0, 0.7, 3.0):
        assert f(x) == ex.eval_closed(e, {"x": x})


def test_bind_rejects_other_free_variables():
    with pytest.raises(EvaluationError):
        ex.bind_univariate(ex.parse("x + y"), "x")
    assert ex.bind_univariate(ex.parse("x + y"), "x", {"y": 2.0})(1.0) == 3.0


def test_overflow_is_a_failed_sample():
    f = ex.bind_univariate(ex.parse("exp(x) * exp(x)"), "x")
    assert math.isnan(f(800.0))


def test_special_forms():
    e = ex.parse("integral(t, 0, inf, exp(-t)) + sum(k, 1, 2^-k)")
    assert isinstance(e.left, ex.Integral) and isinstance(e.right, ex.Sum)
    assert ex.free_vars(e) == frozenset()
    with pytest.raises(ex.ParseError):
        ex.parse("integral(1, 0, 1, x)")
    with pytest.raises(ex.ParseError):
        ex.parse("sum(k, 1)")


# ------------------------------------------------------------ fuzzed round trip

_names = st.sampled_from(["x", "y", "k", "t", "alpha", "b_2"])
_leaves = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(ex.Number),
    st.integers(0, 1000).map(lambda n: ex.Number(float(n))),
    st.sampled_from(["pi", "euler_gamma", "inf"]).map(ex.Const),
    _names.map(ex.Var),
)
_unary_fns = [n for n, (arity, _) in ex.FUNCTIONS.items() if arity == 1]


def _extend(children):
    binops = [ex.Add, ex.Sub, ex.Mul, ex.Div, ex.Pow]
    return st.one_of(
        children.map(ex.Neg),
        st.tuples(st.sampled_from(binops), children, children).map(lambda t: t[0](t[1], t[2])),
        st.tuples(st.sampled_from(_unary_fns), children).map(lambda t: ex.Call(t[0], (t[1],))),
        st.tuples(_names, children, children, children).map(lambda t: ex.Integral(*t)),
        st.tuples(_names, children, children).map(lambda t: ex.Sum(*t)),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=25)


@settings(max_examples=400, deadline=None)
@given(expressions)
def test_round_trip(e):
    assert ex.parse(ex.format(e)) == e
