"""Exception taxonomy shared across the library.

Callers can tell apart bad inputs (DomainError), models that need a different
code path (DegenerateModelError), parameter combinations a formula cannot
represent (DegenerateParameterError), a numerical routine that missed its
accuracy budget (AccuracyError), and root searches whose bracket does not
contain the target (BracketError).
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateModelError(ValueError):
    """The parameter set collapses the model; a dedicated limit path applies."""


class DegenerateParameterError(ValueError):
    """A formula degenerates at this exact parameter (e.g. integer shape gap)."""


class AccuracyError(ArithmeticError):
    """No available evaluation path met the requested accuracy budget."""


class BracketError(ValueError):
    """A root search target lies outside the search bracket."""


class GofFailure(RuntimeError):
    """A goodness-of-fit comparison fell below the configured significance."""
