"""Exceptions shared across the package."""


class ValidationError(ValueError):
    """Bad user input: shapes, ranges, file contents."""


class NumericalError(RuntimeError):
    """Numerical failure: singular fit at zero ridge, no convergent runs."""
