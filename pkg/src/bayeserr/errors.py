"""Exception types shared across the package.

Three failure classes, matching the CLI exit codes: bad argument values
(DomainError), unreadable or invalid input files (DataError), and numeric
fitting failures (FitError).
"""


class BayesErrError(Exception):
    """Base class for all package errors."""


class DomainError(BayesErrError, ValueError):
    """An argument value violates a documented precondition."""


class DataError(BayesErrError, ValueError):
    """An input file is malformed or holds out-of-range values."""


class FitError(BayesErrError, RuntimeError):
    """A fitting procedure cannot produce a usable model."""
