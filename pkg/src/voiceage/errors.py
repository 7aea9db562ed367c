"""Shared exception types.

Every module raises these instead of bare ValueError so callers (CLI,
HTTP service, tests) can map failures to exit codes / status codes.
"""


class VoiceAgeError(Exception):
    """Base class for all library errors."""


class FormatError(VoiceAgeError):
    """Malformed container or file (bad magic, truncated, wrong mode)."""


class UnsupportedFormatError(VoiceAgeError):
    """Well-formed container using a codec/layout we do not handle."""


class DimensionError(VoiceAgeError):
    """Array has the wrong shape for the operation."""


class RangeError(VoiceAgeError):
    """Scalar value outside its documented range."""


class ValidationError(VoiceAgeError):
    """Input violates an operation precondition."""


class ChronologyError(VoiceAgeError):
    """Recording date precedes birth date."""


class SchemaError(VoiceAgeError):
    """Tabular input is missing required columns."""


class StratificationError(VoiceAgeError):
    """A class is absent from the training split."""


class DegenerateDataError(VoiceAgeError):
    """Training set cannot support the model (e.g. single-class SVM)."""
