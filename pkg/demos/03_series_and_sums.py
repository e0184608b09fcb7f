"""
Series: the slow ones too
=========================

Direct summation with a geometric tail bound works for series like
sum 1/(2^(k-1) k^2).  Sums like sum 1/k^2 or the Euler sum
sum H_(n-1)/n^2 converge far too slowly for that; they are rearranged into
alternating series (van Wijngaarden) and accelerated.
"""

import math

from tableverify import series, specfun

for text, exact in [
    ("sum(k, 1, 1 / (2^(k - 1) * k^2))", math.pi**2 / 6 - math.log(2) ** 2),
    ("sum(k, 1, (-1)^(k - 1) / k^2)", math.pi**2 / 12),
    ("sum(k, 1, 1 / k^2)", math.pi**2 / 6),
    ("sum(n, 1, harmonic(n - 1) / n^2)", specfun.zeta(3)),
]:
    spec = series.SeriesSpec.parse(text)
    r = series.sum_series(spec)
    print(f"{text:36s} [{spec.hint:19s}] {r.value:.16f}  err {r.err:.1e}  |Δ| {abs(r.value - exact):.1e}")

# sum c_r H_r alpha^r as an integral of (f(alpha) - f(alpha x)) / (1 - x)
r = series.harmonic_weighted_sum(lambda r: 1 / (r * 2 ** (r - 1)), 1.0,
                                 lambda x: -2 * math.log1p(-x / 2))
print(f"\nsum H_r / (r 2^(r-1)) = {r.value:.16f}, zeta(2) = {specfun.zeta(2):.16f}")
