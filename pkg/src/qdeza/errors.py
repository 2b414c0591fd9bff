"""Exception types shared across the package."""


class QdezaError(Exception):
    """Base class for all package errors."""


class AmbientMismatchError(QdezaError):
    """Operands live in different ambient spaces (v, q)."""


class BudgetExceededError(QdezaError):
    """An enumeration or closure would exceed its resource budget."""


class FormatError(QdezaError):
    """A text input (line-set, spread, matrix file) failed to parse."""


class NotRegularError(QdezaError):
    """A graph operation required a regular q-ary graph.

    ``witness`` is a vertex whose neighborhood is not a subspace (or has
    the wrong dimension).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClassificationError(QdezaError):
    """A classifier found structurally incompatible data (e.g. three
    distinct common-neighbor values).  ``witnesses`` carries offending
    vertex pairs with their observed values."""

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = tuple(witnesses)


class InfeasibleParametersError(QdezaError):
    """A closed-form parameter count came out negative or non-integral."""


class InvariantViolationError(QdezaError):
    """A structural fact that must hold (and is checked at runtime)
    failed; ``witness`` identifies the violating object."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(QdezaError):
    """A constructor's self-check failed."""
