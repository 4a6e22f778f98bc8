"""Exception types shared across the package.

The CLI maps each type onto a distinct exit code.
"""


class DomainError(ValueError):
    """A parameter lies outside the admissible range of a formula."""


class KernelError(DomainError):
    """The kernel condition ``ker Y ⊆ ker X`` is violated."""


class ParseError(ValueError):
    """An input file or argument could not be parsed."""


class NonConvergenceError(RuntimeError):
    """An optimizer failed to reach its tolerance after all restarts."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class VerificationError(AssertionError):
    """A verification suite found a violation."""
