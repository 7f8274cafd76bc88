"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid parameter or configuration value.

    ``kind`` is a stable machine-readable tag naming the violated rule, so
    callers (and the CLI) can distinguish failure modes without parsing
    messages.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class DomainError(ValueError):
    """Real root requested outside its domain (negative base, even degree)."""


class SingularityError(ArithmeticError):
    """Evaluation at the excluded point theta = 2**(1/n) - 1 of the slope helpers."""


class GainOverflowError(OverflowError):
    """A gain or account magnitude exceeded the double-precision range."""
