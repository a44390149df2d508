"""Exception hierarchy shared by all gcovsel modules."""


class GcovError(Exception):
    """Base class for errors raised by gcovsel."""


class InvalidInputError(GcovError, ValueError):
    """Caller supplied a value outside an operation's domain."""


class DegenerateInputError(InvalidInputError):
    """A vector with zero (or negligible) norm where a direction is required."""


class DegreesOfFreedomError(InvalidInputError):
    """Too few observations for the residual degrees of freedom n - k - 1."""


class DomainError(InvalidInputError, ArithmeticError):
    """Argument outside the domain of a closed-form transform."""


class CollinearityError(GcovError):
    """Candidate column lies (numerically) in the span of the included columns."""

    def __init__(self, index, ratio):
        self.index = index
        self.ratio = ratio
        super().__init__(
            f"column {index} is collinear with the included columns "
            f"(residual norm ratio {ratio:.3g})"
        )


class AccuracyError(GcovError, ArithmeticError):
    """An internal numerical result failed its accuracy guard."""


class DataFormatError(InvalidInputError):
    """Malformed tabular input. ``row`` is 1-based and counts the header."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
