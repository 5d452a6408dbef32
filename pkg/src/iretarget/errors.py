"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: validation problems exit
with 2, numerical failures with 1.
"""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition or invariant."""


class NumericError(RuntimeError):
    """Raised when an optimization or numerical routine produces non-finite values."""
