"""Exception hierarchy shared by every module.

The CLI maps these onto its exit-code contract, so each class corresponds to
one kind of outcome rather than one call site.
"""


class SignedFlowError(Exception):
    """Base class for all library errors."""


class PreconditionError(SignedFlowError, ValueError):
    """Input does not satisfy an operation's stated preconditions."""


class NotFlowAdmissible(PreconditionError):
    """The graph admits no nowhere-zero integer flow at all."""


class SizeLimitError(SignedFlowError):
    """An exhaustive routine was asked to run above its configured size limit."""


class BudgetExceeded(SignedFlowError):
    """A search visited more nodes than its budget allows.

    Raised instead of returning a possibly wrong negative answer.
    """


class InvariantViolation(SignedFlowError, RuntimeError):
    """A constructive step produced output that fails its own postcondition.

    This always indicates a bug (or a counterexample to a theorem), never bad input.
    """


class AuditFailure(InvariantViolation):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class FormatError(SignedFlowError, ValueError):
    """A graph or certificate file could not be parsed."""
