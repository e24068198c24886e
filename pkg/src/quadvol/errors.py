"""Exception types shared across the package."""


class QuadVolError(Exception):
    """Base class for all errors raised by quadvol."""


class InvalidArgument(QuadVolError, ValueError):
    """An input violates a documented precondition (zero, degenerate, non-prime...)."""


class WrongDispatch(QuadVolError, ValueError):
    """A prime-specific routine was called for the wrong prime."""


class PreconditionError(QuadVolError, ValueError):
    """The input is valid in general but outside the domain of this formula."""


class Unsupported(QuadVolError, ValueError):
    """The computation is not implemented for this kind of lattice."""


class ResourceLimitError(QuadVolError, RuntimeError):
    """An enumeration would exceed its configured budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} matrices, budget is {budget}")
