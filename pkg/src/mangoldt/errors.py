"""Error taxonomy shared by the library and the CLI exit-code mapping."""


class MangoldtError(Exception):
    """Base class for all library errors."""


class DomainError(MangoldtError, ValueError):
    """Invalid argument: out-of-domain value, bad configuration, bad shape."""

    exit_code = 2


class NumericError(MangoldtError, ArithmeticError):
    """A numeric procedure failed: divergent sum, non-convergent iteration."""

    exit_code = 3


class CapacityError(MangoldtError):
    """Request exceeds the dense-array limit; use a streaming operation."""

    exit_code = 4
