"""Exception types raised by emdhurst.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch one type.
"""


class EmdHurstError(ValueError):
    """Base class for all package errors."""


class TooShortError(EmdHurstError):
    pass


class MissingColumnError(EmdHurstError):
    pass


class NoValidRowsError(EmdHurstError):
    pass


class UnparseableDateError(EmdHurstError):
    def __init__(self, row, value):
        super().__init__(f"row {row}: cannot parse date {value!r}")
        self.row = row
        self.value = value


class OutOfRangeError(EmdHurstError, IndexError):
    pass


class InsufficientAnchorsError(EmdHurstError):
    pass


class NoOscillationError(EmdHurstError):
    pass


class ZeroMagnitudeError(EmdHurstError):
    def __init__(self, indices):
        super().__init__(
            f"analytic signal magnitude vanishes at {len(indices)} interior points"
        )
        self.indices = indices


class DegenerateSeriesError(EmdHurstError):
    pass


class RankDeficientError(EmdHurstError):
    pass


class AllRankDeficientError(EmdHurstError):
    pass


class InvalidSpecError(EmdHurstError):
    pass


class AllZeroImfsError(EmdHurstError):
    pass


class InconsistentInputsError(EmdHurstError):
    pass


class ConfigError(EmdHurstError):
    pass
