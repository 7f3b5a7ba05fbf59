"""Exception hierarchy.

Every error carries a ``code`` (its class name) and the ``module`` that raised
it, and belongs to one of three exit categories used by the command line:
validation (2), budget (3) and internal inconsistency (4).
"""

from __future__ import annotations

EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


class WallkitError(Exception):
    exit_code = EXIT_VALIDATION
    module = "wallkit"

    @property
    def code(self) -> str:
        return type(self).__name__

    def record(self) -> dict:
        return {"code": self.code, "module": self.module, "message": str(self)}


class ValidationError(WallkitError):
    exit_code = EXIT_VALIDATION


class BudgetError(WallkitError):
    exit_code = EXIT_BUDGET


class InternalInconsistency(WallkitError):
    exit_code = EXIT_INTERNAL


# graph_core
class InvalidVertex(ValidationError, IndexError):
    module = "graph_core"


class NotGated(ValidationError):
    module = "graph_core"


class NotAWalk(ValidationError):
    module = "graph_core"


class BadGraph(ValidationError):
    module = "graph_core"


# walls
class NotParaclique(ValidationError):
    module = "walls"

    def __init__(self, message, hyperplanes=None):
        super().__init__(message)
        self.hyperplanes = hyperplanes


class NotGeodesic(ValidationError):
    module = "walls"


# order
class NoMeet(ValidationError):
    module = "order"


# coxeter
class BadSystem(ValidationError):
    module = "coxeter"


class BadDiagonal(BadSystem):
    pass


class Asymmetric(BadSystem):
    pass


class BadLabel(BadSystem):
    pass


class BadWord(ValidationError):
    module = "coxeter"


class PrecisionExhausted(BudgetError):
    module = "coxeter"


class BraidClosureOverflow(BudgetError):
    module = "coxeter"


class BallTooLarge(BudgetError):
    module = "coxeter"


# dynamics
class FiniteOrderElement(ValidationError):
    module = "dynamics"


class AllCandidatesRejected(ValidationError):
    module = "dynamics"


class DomainExceeded(ValidationError):
    module = "dynamics"


# boundary
class NotFromRoot(ValidationError):
    module = "boundary"


# cli
class UnsupportedFormat(ValidationError):
    module = "cli"
