"""Exception types shared across the toolkit.

Two failure families, kept distinct so the command line can map them to
distinct exit codes: bad input data versus numerically degenerate problems.
"""


class DataError(ValueError):
    """Input data is malformed, missing, inconsistent, or insufficient."""


class NumericalError(ArithmeticError):
    """A computation is numerically degenerate (rank deficient, singular, constant)."""
