"""Real special functions needed by the integral-table corpus.

Everything here works in binary64 and is a plain function of floats.
Alternating sums (eta, Dirichlet beta and its derivative) go through the
shared accelerator in :mod:`tableverify.accel`.
"""

from __future__ import annotations

import math

from .accel import cvz_sum
from .numeric import DomainError

PI = 3.1415926535897932385
EULER_GAMMA = 0.57721566490153286061
LN2 = 0.69314718055994530942

ZETA2 = PI * PI / 6.0

# Lanczos coefficients, g = 607/128, 15 terms (Godfrey; as tabulated in
# Numerical Recipes, 3rd ed., gammln).  Quoted relative accuracy < 1e-15 for
# x > 0; tests hold it to 1e-13 on [0.1, 50].
_LANCZOS_G_HALF = 5.24218750000000000  # g + 1/2
_LANCZOS_SER0 = 0.999999999999997092
_LANCZOS_COF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005

# above this, H_n comes from its asymptotic expansion (next term < 1e-25)
_HARMONIC_DIRECT_MAX = 1000


def _lanczos_series(x: float) -> float:
    ser = _LANCZOS_SER0
    y = x
    for c in _LANCZOS_COF:
        y += 1.0
        ser += c / y
    return ser


def gamma(x: float) -> float:
    """Gamma function for ``x > 0``.

    Overflows to ``inf`` (rather than raising) for x beyond about 171.6.
    """
    if not x > 0.0:
        raise DomainError(f"gamma: argument must be > 0, got {x!r}")
    if x > 171.7:
        return math.inf
    t = x + _LANCZOS_G_HALF
    # split the power so t**(x+1/2) does not overflow before exp(-t) applies
    half = t ** ((x + 0.5) / 2.0)
    return (half * math.exp(-t) / x) * half * (_SQRT_2PI * _lanczos_series(x))


def lngamma(x: float) -> float:
    """``ln Gamma(x)`` for ``x > 0``."""
    if not x > 0.0:
        raise DomainError(f"lngamma: argument must be > 0, got {x!r}")
    t = x + _LANCZOS_G_HALF
    return (x + 0.5) * math.log(t) - t + math.log(_SQRT_2PI * _lanczos_series(x) / x)


def eta(s: float) -> float:
    """Dirichlet eta ``sum_{n>=1} (-1)**(n-1) n**-s`` for ``s > 0``."""
    if not s > 0.0:
        raise DomainError(f"eta: argument must be > 0, got {s!r}")
    return cvz_sum(lambda k: (k + 1.0) ** -s)


def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``, via ``eta(s) / (1 - 2**(1-s))``."""
    if not s > 1.0:
        raise DomainError(f"zeta: argument must be > 1, got {s!r}")
    return eta(s) / -math.expm1((1.0 - s) * LN2)


def dilog(x: float) -> float:
    """Real dilogarithm ``Li2(x) = sum_{k>=1} x**k / k**2`` for ``x <= 1``.

    The power series is used on [0, 1/2]; (1/2, 1) is mapped there with
    Euler's reflection and negative arguments with the Landen identity
    ``Li2(x) = -Li2(x/(x-1)) - ln(1-x)**2 / 2``.
    """
    if not x <= 1.0:
        raise DomainError(f"dilog: argument must be <= 1, got {x!r}")
    if x == 1.0:
        return ZETA2
    if x < 0.0:
        return -dilog(x / (x - 1.0)) - 0.5 * math.log1p(-x) ** 2
    if x > 0.5:
        y = 1.0 - x
        return ZETA2 - math.log(x) * math.log(y) - _dilog_series(y)
    return _dilog_series(x)


def _dilog_series(x: float) -> float:
    # 0 <= x <= 1/2, so 60 terms are ample
    total = 0.0
    p = 1.0
    for k in range(1, 80):
        p *= x
        term = p / (k * k)
        total += term
        if term < 1e-18 * total:
            break
    return total


def dbeta(s: float) -> float:
    """Dirichlet beta ``L(s) = sum_{k>=0} (-1)**k (2k+1)**-s`` for ``s > 0``."""
    if not s > 0.0:
        raise DomainError(f"dbeta: argument must be > 0, got {s!r}")
    return cvz_sum(lambda k: (2.0 * k + 1.0) ** -s)


def dbeta_prime(s: float) -> float:
    """Derivative of :func:`dbeta`, ``-sum (-1)**k ln(2k+1) (2k+1)**-s``."""
    if not s > 0.0:
        raise DomainError(f"dbeta_prime: argument must be > 0, got {s!r}")

    def term(k: int) -> float:
        m = 2.0 * k + 1.0
        return -math.log(m) * m**-s

    return cvz_sum(term)


def dbeta_prime_at_1() -> float:
    """``L'(1)``, about 0.1929013168."""
    return dbeta_prime(1.0)


def harmonic(n) -> float:
    """Harmonic number ``H_n = 1 + 1/2 + ... + 1/n``, ``H_0 = 0``.

    ``n`` may be a float as long as it is a non-negative integer value.
    """
    if isinstance(n, float):
        if not (math.isfinite(n) and n == math.floor(n)):
            raise DomainError(f"harmonic: argument must be a non-negative integer, got {n!r}")
    elif not isinstance(n, int):
        raise DomainError(f"harmonic: argument must be a non-negative integer, got {n!r}")
    if n < 0:
        raise DomainError(f"harmonic: argument must be >= 0, got {n!r}")
    if n <= _HARMONIC_DIRECT_MAX:
        return math.fsum(1.0 / j for j in range(1, int(n) + 1))
    n = float(n)
    inv2 = 1.0 / (n * n)
    tail = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 / 240)))
    return math.log(n) + EULER_GAMMA + 0.5 / n - tail
