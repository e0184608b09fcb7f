"""Shared result type and exception hierarchy."""

from __future__ import annotations

import math
from dataclasses import dataclass


class TableVerifyError(Exception):
    """Base class for every error raised by this package."""


class EvaluationError(TableVerifyError, ValueError):
    """An expression could not be evaluated (unbound variable, bad node, ...)."""


class DomainError(EvaluationError):
    """A function was called outside its domain, or the result is not finite."""


class ConvergenceError(TableVerifyError):
    """A summation or quadrature did not reach its tolerance."""


class SingularityError(ConvergenceError):
    """Non-finite integrand sample away from the endpoint clusters."""


class NoDecayError(ConvergenceError):
    """Integrand on a half-infinite range does not decay at the far nodes."""


@dataclass(frozen=True)
class NumericResult:
    """A computed value with a claimed absolute error bound."""

    value: float
    err: float
    terms_used: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.err) and self.err >= 0.0):
            raise ValueError(f"error estimate must be finite and >= 0, got {self.err!r}")

    def __iter__(self):
        # allows ``value, err = result``
        yield self.value
        yield self.err
