"""Exception types shared across the package.

Every error raised on a bad input derives from FopkitError so the CLI can
map failures onto its exit-code contract (2 for malformed input, 3 for
exhausted budgets).
"""

from __future__ import annotations


class FopkitError(Exception):
    """Base class for all errors raised by this package."""


class VocabularyError(FopkitError):
    """Bad vocabulary declaration (duplicate, reserved or zero-arity symbol)."""


class StructureError(FopkitError):
    """Structure inconsistent with its vocabulary or universe."""


class ParseError(FopkitError):
    """Syntax error in a text format, with source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EvalError(FopkitError):
    """Formula cannot be evaluated on the given structure."""


class PrefixShapeError(EvalError):
    """Second-order prefix is not an existential block followed by a universal one."""


class NormalFormError(FopkitError):
    """Sentence rejected by the normal-form validator."""


class QueryError(FopkitError):
    """Malformed first-order query, or query applied to an unsuitable structure."""


class EmptyUniverseError(QueryError):
    """Universe formula of a query selected no tuples."""


class InstanceError(FopkitError):
    """Problem instance violates its representation invariants."""


class ReductionError(FopkitError):
    """Reduction cannot be built or applied."""


class CompileError(ReductionError):
    """Generic compilation rejected the input sentence."""


class WitnessError(FopkitError):
    """Witness constructor not applicable to the given conditions."""


class BudgetExceededError(FopkitError):
    """An enumeration or search would exceed its configured budget."""
