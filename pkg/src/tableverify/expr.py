"""Expression trees for closed forms, integrands and summands.

Grammar (``^`` is right-associative; unary minus binds tighter than ``*``
but looser than ``^``, so ``-x^2`` is ``-(x^2)``)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'pi' | 'euler_gamma' | 'inf' | IDENT
            | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Two call-shaped special forms build binding constructs rather than function
calls: ``integral(x, lo, hi, body)`` and ``sum(k, start, body)``.  Their
numeric evaluation lives in :mod:`tableverify.verify`; :func:`eval_closed`
only handles closed forms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, ClassVar, Mapping

from . import specfun
from .numeric import DomainError, EvaluationError, TableVerifyError

__all__ = [
    "Expression", "Number", "Const", "Var", "Neg", "BinOp", "Add", "Sub", "Mul",
    "Div", "Pow", "Call", "Integral", "Sum", "SourceSpan", "ParseError",
    "FUNCTIONS", "CONSTANTS", "parse", "format", "eval_closed", "bind_univariate",
    "free_vars", "apply_binary", "apply_function",
]


# --------------------------------------------------------------------- nodes


class Expression:
    """Base class of all expression nodes (immutable)."""

    __slots__ = ()

    def __str__(self) -> str:
        return format(self)


@dataclass(frozen=True, slots=True)
class Number(Expression):
    value: float


@dataclass(frozen=True, slots=True)
class Const(Expression):
    name: str  # 'pi' | 'euler_gamma' | 'inf'


@dataclass(frozen=True, slots=True)
class Var(Expression):
    name: str


@dataclass(frozen=True, slots=True)
class Neg(Expression):
    child: Expression


@dataclass(frozen=True, slots=True)
class BinOp(Expression):
    left: Expression
    right: Expression
    op: ClassVar[str] = "?"


@dataclass(frozen=True, slots=True)
class Add(BinOp):
    op: ClassVar[str] = "+"


@dataclass(frozen=True, slots=True)
class Sub(BinOp):
    op: ClassVar[str] = "-"


@dataclass(frozen=True, slots=True)
class Mul(BinOp):
    op: ClassVar[str] = "*"


@dataclass(frozen=True, slots=True)
class Div(BinOp):
    op: ClassVar[str] = "/"


@dataclass(frozen=True, slots=True)
class Pow(BinOp):
    op: ClassVar[str] = "^"


@dataclass(frozen=True, slots=True)
class Call(Expression):
    name: str
    args: tuple[Expression, ...]


@dataclass(frozen=True, slots=True)
class Integral(Expression):
    """``integral(var, lower, upper, body)``; ``upper`` may be ``inf``."""

    var: str
    lower: Expression
    upper: Expression
    body: Expression


@dataclass(frozen=True, slots=True)
class Sum(Expression):
    """``sum(var, start, body)`` to infinity."""

    var: str
    start: Expression
    body: Expression


_BINOPS: dict[str, type[BinOp]] = {c.op: c for c in (Add, Sub, Mul, Div, Pow)}


# ------------------------------------------------------------ function table


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _cosh(x: float) -> float:
    try:
        return math.cosh(x)
    except OverflowError:
        return math.inf


def _sinh(x: float) -> float:
    try:
        return math.sinh(x)
    except OverflowError:
        return math.copysign(math.inf, x)


def _ln(x: float) -> float:
    if not x > 0.0:
        raise DomainError(f"ln of non-positive value {x!r}")
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise DomainError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


def _atanh(x: float) -> float:
    if not abs(x) < 1.0:
        raise DomainError(f"atanh requires |x| < 1, got {x!r}")
    return math.atanh(x)


def _tan(x: float) -> float:
    return math.tan(x)


#: name -> (arity, implementation); the closed set accepted by the parser
FUNCTIONS: dict[str, tuple[int, Callable[..., float]]] = {
    "exp": (1, _exp),
    "ln": (1, _ln),
    "sqrt": (1, _sqrt),
    "sin": (1, math.sin),
    "cos": (1, math.cos),
    "tan": (1, _tan),
    "sinh": (1, _sinh),
    "cosh": (1, _cosh),
    "tanh": (1, math.tanh),
    "atanh": (1, _atanh),
    "abs": (1, abs),
    "gamma": (1, specfun.gamma),
    "lngamma": (1, specfun.lngamma),
    "zeta": (1, specfun.zeta),
    "dilog": (1, specfun.dilog),
    "dbeta": (1, specfun.dbeta),
    "dbeta_prime": (1, specfun.dbeta_prime),
    "harmonic": (1, specfun.harmonic),
}

CONSTANTS: dict[str, float] = {
    "pi": specfun.PI,
    "euler_gamma": specfun.EULER_GAMMA,
    "inf": math.inf,
}

# special forms: name -> number of arguments (first one is the bound variable)
_SPECIAL_FORMS = {"integral": 4, "sum": 3}


def apply_binary(op: str, a: float, b: float) -> float:
    """Apply one arithmetic operator with domain checking."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b
    if op == "^":
        try:
            return math.pow(a, b)
        except OverflowError:
            return math.inf
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"{a!r}^{b!r} is undefined over the reals") from exc
    raise EvaluationError(f"unknown operator {op!r}")


def apply_function(name: str, *args: float) -> float:
    """Call a function from :data:`FUNCTIONS` by name, mapping math errors."""
    try:
        arity, fn = FUNCTIONS[name]
    except KeyError:
        raise EvaluationError(f"unknown function {name!r}") from None
    if len(args) != arity:
        raise EvaluationError(f"{name} takes {arity} argument(s), got {len(args)}")
    try:
        return fn(*args)
    except DomainError:
        raise
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"{name}{args!r}: {exc}") from exc


# ------------------------------------------------------------------ parsing


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the UTF-8 encoded source."""

    start: int
    end: int


class ParseError(TableVerifyError, ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at bytes {span.start}..{span.end}")
        self.message = message
        self.span = span


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num' | 'ident' | 'op' | 'end'
    text: str
    start: int  # character offsets; converted to bytes for errors
    end: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), m.start(), m.end()))
        pos = m.end()
    tokens.append(_Token("end", "", len(text), len(text)))
    return tokens


def _span(text: str, start: int, end: int) -> SourceSpan:
    return SourceSpan(len(text[:start].encode()), len(text[:end].encode()))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, start: int | None = None) -> ParseError:
        tok = self.tok
        if start is None:
            start = tok.start
        return ParseError(message, _span(self.text, start, max(tok.end, start)))

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str, start: int | None = None) -> None:
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {found!r}", start)

    def parse(self) -> Expression:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expression:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            left = _BINOPS[op](left, self.term())
        return left

    def term(self) -> Expression:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            left = _BINOPS[op](left, self.unary())
        return left

    def unary(self) -> Expression:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expression:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Number(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            return Var(tok.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")", tok.start)
            return e
        found = tok.text or "end of input"
        raise self.error(f"expected an operand, found {found!r}")

    def call(self, name_tok: _Token) -> Expression:
        name = name_tok.text
        if name not in FUNCTIONS and name not in _SPECIAL_FORMS:
            raise ParseError(
                f"unknown function {name!r}", _span(self.text, name_tok.start, name_tok.end)
            )
        self.expect("(")
        try:
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")", name_tok.start)
        except ParseError as exc:
            if self.tok.kind != "end":
                raise
            span = _span(self.text, name_tok.start, len(self.text))
            raise ParseError(f"unterminated call to {name!r} ({exc.message})", span) from None
        span = _span(self.text, name_tok.start, self.tokens[self.i - 1].end)
        if name in _SPECIAL_FORMS:
            want = _SPECIAL_FORMS[name]
            if len(args) != want:
                raise ParseError(f"{name} takes {want} arguments, got {len(args)}", span)
            if not isinstance(args[0], Var):
                raise ParseError(f"first argument of {name} must be a variable name", span)
            if name == "integral":
                return Integral(args[0].name, args[1], args[2], args[3])
            return Sum(args[0].name, args[1], args[2])
        arity = FUNCTIONS[name][0]
        if len(args) != arity:
            raise ParseError(f"{name} takes {arity} argument(s), got {len(args)}", span)
        return Call(name, tuple(args))


def parse(text: str) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    >>> parse("pi^2/12")
    Div(left=Pow(left=Const(name='pi'), right=Number(value=2.0)), right=Number(value=12.0))
    """
    return _Parser(text).parse()


# --------------------------------------------------------------- formatting

_ATOM, _POW, _NEG, _MUL, _ADD = 5, 4, 3, 2, 1


def _prec(e: Expression) -> int:
    if isinstance(e, (Add, Sub)):
        return _ADD
    if isinstance(e, (Mul, Div)):
        return _MUL
    if isinstance(e, Neg):
        return _NEG
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _fmt_number(v: float) -> str:
    if v == math.floor(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def format(e: Expression) -> str:  # noqa: A001 - mirrors parse()
    """Canonical text for ``e``; ``parse(format(e)) == e``.

    Parentheses appear only where precedence or associativity needs them.
    Number literals must be finite and non-negative (a parsed ``-3`` is
    ``Neg(Number(3))``).
    """
    if isinstance(e, Number):
        return _fmt_number(e.value)
    if isinstance(e, (Const, Var)):
        return e.name
    if isinstance(e, Neg):
        inner = format(e.child)
        if _prec(e.child) < _NEG:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        left, right = format(e.left), format(e.right)
        if _prec(e.left) != _ATOM:
            left = f"({left})"
        if _prec(e.right) < _NEG:
            right = f"({right})"
        return f"{left}^{right}"
    if isinstance(e, BinOp):
        p = _prec(e)
        left, right = format(e.left), format(e.right)
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        sep = f" {e.op} " if p == _ADD else e.op
        return f"{left}{sep}{right}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format(a) for a in e.args)})"
    if isinstance(e, Integral):
        parts = (e.var, format(e.lower), format(e.upper), format(e.body))
        return f"integral({', '.join(parts)})"
    if isinstance(e, Sum):
        return f"sum({e.var}, {format(e.start)}, {format(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------- evaluation


def free_vars(e: Expression) -> frozenset[str]:
    """Names of variables not bound by an enclosing integral or sum."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return free_vars(e.child)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Call):
        return frozenset().union(*(free_vars(a) for a in e.args))
    if isinstance(e, Integral):
        return free_vars(e.lower) | free_vars(e.upper) | (free_vars(e.body) - {e.var})
    if isinstance(e, Sum):
        return free_vars(e.start) | (free_vars(e.body) - {e.var})
    return frozenset()


def eval_closed(e: Expression, bindings: Mapping[str, float] | None = None) -> float:
    """Evaluate a closed form to a finite double.

    Raises :class:`DomainError` for out-of-domain calls or a non-finite
    result, and :class:`EvaluationError` for unbound variables, ``inf`` in
    arithmetic, or integral/sum nodes.
    """
    value = _eval(e, bindings or {})
    if not math.isfinite(value):
        raise DomainError(f"non-finite value {value!r}")
    return value


def _eval(e: Expression, env: Mapping[str, float]) -> float:
    if isinstance(e, Number):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Const):
        if e.name == "inf":
            raise EvaluationError("'inf' is only allowed as an integral bound")
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.child, env)
    if isinstance(e, BinOp):
        return apply_binary(e.op, _eval(e.left, env), _eval(e.right, env))
    if isinstance(e, Call):
        return apply_function(e.name, *(_eval(a, env) for a in e.args))
    if isinstance(e, (Integral, Sum)):
        raise EvaluationError(f"{type(e).__name__.lower()} is not a closed form: {format(e)}")
    raise TypeError(f"not an expression: {e!r}")


def bind_univariate(
    e: Expression, var: str, fixed: Mapping[str, float] | None = None
) -> Callable[[float], float]:
    """Compile ``e`` into ``f(t) = eval_closed(e, {var: t, **fixed})``.

    The returned function never raises on bad samples: any domain error or
    non-finite value comes back as ``nan``, which the quadrature and series
    engines treat as a failed sample.
    """
    fixed = dict(fixed or {})
    extra = free_vars(e) - {var} - set(fixed)
    if extra:
        raise EvaluationError(f"free variables {sorted(extra)} besides {var!r}")
    fixed.pop(var, None)
    g = _compile(e, var, fixed)

    def f(t: float) -> float:
        try:
            v = g(t)
        except (EvaluationError, ValueError, ZeroDivisionError, OverflowError):
            return math.nan
        return v if math.isfinite(v) else math.nan

    return f


def _compile(e: Expression, var: str, fixed: Mapping[str, float]) -> Callable[[float], float]:
    # Closures instead of a tree walk: integrands are sampled thousands of times.
    if isinstance(e, Var):
        if e.name == var:
            return lambda t: t
        c = fixed[e.name]
        return lambda t: c
    if isinstance(e, (Number, Const)):
        c = _eval(e, {})
        return lambda t: c
    if isinstance(e, Neg):
        g = _compile(e.child, var, fixed)
        return lambda t: -g(t)
    if isinstance(e, BinOp):
        a = _compile(e.left, var, fixed)
        b = _compile(e.right, var, fixed)
        if isinstance(e, Add):
            return lambda t: a(t) + b(t)
        if isinstance(e, Sub):
            return lambda t: a(t) - b(t)
        if isinstance(e, Mul):
            return lambda t: a(t) * b(t)
        if isinstance(e, Div):
            return lambda t: a(t) / b(t)
        if isinstance(e.right, Number) and e.right.value == 2.0:

            def square(t: float) -> float:
                v = a(t)
                return v * v  # overflows to inf instead of raising

            return square
        return lambda t: apply_binary("^", a(t), b(t))
    if isinstance(e, Call):
        fn = FUNCTIONS[e.name][1]
        (g,) = (_compile(arg, var, fixed) for arg in e.args)
        return lambda t: fn(g(t))
    if isinstance(e, (Integral, Sum)):
        raise EvaluationError(f"{type(e).__name__.lower()} is not a closed form: {format(e)}")
    raise TypeError(f"not an expression: {e!r}")
