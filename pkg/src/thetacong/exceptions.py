"""Exception hierarchy.

Three families, mapped to CLI exit codes: invalid input (2), violated
preconditions (3) and internal inconsistencies (4).  The last one is raised
when a step that is guaranteed to succeed mathematically fails, so it
always signals a bug.
"""


class ThetaCongError(Exception):
    exit_code = 1


class InvalidInput(ThetaCongError, ValueError):
    exit_code = 2


class NotSymmetric(InvalidInput):
    pass


class NotPositiveDefinite(InvalidInput):
    pass


class NotEven(InvalidInput):
    pass


class NotIsometry(InvalidInput):
    pass


class SingularMatrixError(InvalidInput):
    pass


class PreconditionError(ThetaCongError, ValueError):
    exit_code = 3


class BudgetExceeded(PreconditionError):
    """A configurable search or enumeration budget ran out.

    This is never a claim that no solution exists.
    """


class OrderBoundExceeded(PreconditionError):
    pass


class InternalInconsistency(ThetaCongError, RuntimeError):
    exit_code = 4
