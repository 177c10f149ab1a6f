"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: FormatError -> 2, PreconditionError -> 3,
CrossCheckError -> 4.
"""


class BidiskError(Exception):
    pass


class FormatError(BidiskError):
    """Malformed input file or serialized polynomial."""


class PreconditionError(BidiskError):
    """A mathematical precondition of an operation does not hold."""


class CrossCheckError(BidiskError):
    """Two independent routes to the same quantity disagree."""
