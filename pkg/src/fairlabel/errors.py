"""Exception types raised across the package.

All errors derive from :class:`FairLabelError` (itself a ``ValueError``) so
callers can catch the whole family in one clause.
"""


class FairLabelError(ValueError):
    """Base class for every error raised by this package."""


class EmptyGroupError(FairLabelError):
    pass


class InvalidFractionError(FairLabelError):
    pass


class SchemaMismatchError(FairLabelError):
    pass


class DuplicateRowIdError(FairLabelError):
    pass


class UnknownRowIdError(FairLabelError):
    pass


class DirectionMismatchError(FairLabelError):
    pass


class DegenerateTrainingError(FairLabelError):
    pass


class DimensionMismatchError(FairLabelError):
    pass


class InvalidSpecError(FairLabelError):
    pass


class NoEligibleRowsError(FairLabelError):
    pass


class EmptyInjectedLogError(FairLabelError):
    pass


class LengthMismatchError(FairLabelError):
    pass


class ZeroMajorityRateError(FairLabelError):
    pass


class SchemaError(FairLabelError):
    """Raised by the loaders when a source file has an unexpected layout."""


class EmptyAfterCleaningError(FairLabelError):
    pass
