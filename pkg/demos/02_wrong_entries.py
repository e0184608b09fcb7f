"""
Three kinds of table errors
===========================

* a typo that changed the integrand (cosh(x)^2 for cosh(x^2)),
* an entry whose tabulated value is simply wrong,
* an entry whose integral diverges.
"""

from tableverify import quad, verify
from tableverify import expr as ex

records = {r.id: r for r in verify.bundled_corpus()}

for rid in ("GR-3.511.8-WRONG", "GR-3.511.8-FIXED", "GR-3.511.8-NEW"):
    rep = verify.verify_identity(records[rid])
    print(f"{rid:18s} {rep.verdict.tag.value:9s} lhs={rep.lhs.value:.12f} rhs={rep.rhs.value:.12f}")

# the tabulated value pi / (2 sqrt 6) is off by about 0.025; the true value
# has no known closed form, so the report just carries the number
rep = verify.verify_identity(records["GR-3.248.5"])
print(f"\nGR-3.248.5: integral = {rep.lhs.value:.15f}, table says {rep.rhs.value:.15f}")

# the divergent entry: the exp-sinh rule refuses (no decay), the window test
# then looks at how the running integral oscillates on [2^(j-1), 2^j]
f = ex.bind_univariate(ex.parse("x * sin(x^2) * sin(2 * x)"), "x")
out = quad.detect_divergence(f, 0.0)
print(f"\n{type(out).__name__}: slope {out.slope:+.4f}")
for w in out.windows:
    print(f"  [{w.lo:6.1f}, {w.hi:6.1f}]  integral {w.integral:+.6f}  oscillation {w.magnitude:.4f}")
