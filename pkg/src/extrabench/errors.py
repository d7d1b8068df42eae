"""Exception types shared across the package."""


class DegenerateSplitError(ValueError):
    """A train/test partition came out empty on one side."""


class NumericOverflowError(ArithmeticError):
    """A computation produced a non-finite value."""


class SingularSystemError(ValueError):
    """A linear system has no unique solution (rank-deficient design)."""
