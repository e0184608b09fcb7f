"""
Checking one table entry by hand
================================

Parse an integral, evaluate it with double-exponential quadrature, and
compare with the tabulated closed form.
"""

from tableverify import classify, eval_closed, integrate, parse
from tableverify.quad import IntegralSpec

# the entry: integral of x / (1 - e^-x) from 0 to ln 2 is pi^2 / 12
lhs = integrate(IntegralSpec.parse("integral(x, 0, ln(2), x / (1 - exp(-x)))"))
rhs = eval_closed(parse("pi^2 / 12"))
print(f"quadrature  {lhs.value:.16f}  (claimed error {lhs.err:.1e}, {lhs.terms_used} samples)")
print(f"closed form {rhs:.16f}")

# classify applies the default budget: lhs.err + 1e-9 + 1e-9 * |rhs|
print(classify(lhs, rhs))

# a wrong right-hand side is refuted once the gap exceeds 100 budgets
print(classify(lhs, rhs + 1e-3).tag.value)
