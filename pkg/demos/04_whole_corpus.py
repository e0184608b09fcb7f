"""
Running the bundled corpus
==========================

Same as ``tableverify verify corpus/paper.ids`` but from Python, with a
look at the error budgets.
"""

from tableverify import verify

reports, summary = verify.run_corpus(verify.bundled_corpus(), jobs=4)
for rep in reports:
    v = rep.verdict
    ratio = v.discrepancy / v.budget if v.budget == v.budget else float("nan")
    print(f"{rep.id:32s} {v.tag.value:10s} Δ/budget = {ratio:9.2e}  {rep.ms:7.1f} ms")
print(summary)
