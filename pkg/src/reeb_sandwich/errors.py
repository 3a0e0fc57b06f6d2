"""Exception hierarchy.

Every error carries the name of the pipeline stage that raised it so the CLI
can report provenance and pick an exit status.
"""

from __future__ import annotations


class ReebSandwichError(Exception):
    stage = "core"
    exit_code = 2


# -- expressions --------------------------------------------------------------

class ExprError(ReebSandwichError, ValueError):
    stage = "expr"


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class ExprDomainError(ExprError, ArithmeticError):
    """Evaluation left the domain of the expression (x/0, sqrt(-1), overflow)."""


# -- boundary functions -------------------------------------------------------

class CertificationFailure(ReebSandwichError):
    stage = "funcspec"
    exit_code = 3

    def __init__(self, message: str, lo: float, hi: float):
        super().__init__(f"{message} on [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi


class OrderViolation(ReebSandwichError):
    stage = "funcspec"

    def __init__(self, lo: float, hi: float, bound: float):
        super().__init__(
            f"c2 - c1 not certified positive on [{lo!r}, {hi!r}] (lower bound {bound!r})"
        )
        self.lo = lo
        self.hi = hi
        self.bound = bound


class DeclarationContradiction(ReebSandwichError):
    stage = "funcspec"


class MissingDeclaration(ReebSandwichError):
    stage = "classify"


# -- surface / sweep / oracle -------------------------------------------------

class SamplingFailure(ReebSandwichError):
    stage = "surface"


class RootAmbiguity(ReebSandwichError):
    stage = "reeb"
    exit_code = 3


class EventCollision(ReebSandwichError):
    stage = "reeb"
    exit_code = 3


class ReebConsistencyError(ReebSandwichError):
    """The sweep produced linkage that violates level-set monotonicity."""

    stage = "reeb"
    exit_code = 3


class ResolutionWarning(UserWarning):
    pass


class ConfigError(ReebSandwichError):
    stage = "config"
