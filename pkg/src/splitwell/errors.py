"""Exception taxonomy shared by all modules.

DomainError flags arguments outside an operation's domain, ContractError
flags violated preconditions between otherwise valid values (geometry
mismatch, unnormalized state), and NumericalError flags a computation that
ran but failed to reach its accuracy target.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ContractError(ValueError):
    """A precondition linking several arguments is violated."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its tolerance.

    Carries the best available estimate so callers can still inspect it.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 achieved_error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved_error = achieved_error
