"""Numerical verification of integral-table and series identities.

Submodules:

* :mod:`~tableverify.expr` - expression AST, parser, formatter, evaluator
* :mod:`~tableverify.specfun` - gamma, zeta, dilogarithm, Dirichlet beta, ...
* :mod:`~tableverify.quad` - double-exponential quadrature, divergence test
* :mod:`~tableverify.series` - direct, accelerated and condensed summation
* :mod:`~tableverify.verify` - identity records, corpus format, verdicts
* :mod:`~tableverify.cli` - the ``tableverify`` command
"""

from .expr import Expression, ParseError, SourceSpan, eval_closed, format, parse
from .numeric import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    NoDecayError,
    NumericResult,
    SingularityError,
    TableVerifyError,
)
from .quad import IntegralSpec, detect_divergence, integrate
from .series import SeriesSpec, sum_series
from .verify import (
    CorpusError,
    IdentityRecord,
    Options,
    Report,
    Tag,
    Verdict,
    bundled_corpus,
    classify,
    evaluate,
    load_corpus,
    run_corpus,
    verify_identity,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "CorpusError", "DomainError", "EvaluationError", "Expression",
    "IdentityRecord", "IntegralSpec", "NoDecayError", "NumericResult", "Options",
    "ParseError", "Report", "SeriesSpec", "SingularityError", "SourceSpan", "TableVerifyError",
    "Tag", "Verdict", "bundled_corpus", "classify", "detect_divergence", "eval_closed",
    "evaluate", "format", "integrate", "load_corpus", "parse", "run_corpus", "sum_series",
    "verify_identity",
]
