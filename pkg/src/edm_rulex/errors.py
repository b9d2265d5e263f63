"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a declared contract: bad schema, bad token, bad config."""


class NumericError(ArithmeticError):
    """A computation cannot proceed numerically: divergence, singular or
    non-positive-definite matrix, non-finite fitness."""
