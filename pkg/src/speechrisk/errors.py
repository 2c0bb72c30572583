"""Exception hierarchy for the speechrisk package.

Every domain error derives from SpeechRiskError so callers (CLI, service)
can map the whole family onto one exit code / HTTP status. Constructors
take a human-readable message carrying the offending detail.
"""


class SpeechRiskError(Exception):
    """Base class for all domain errors raised by speechrisk."""


# --- audio_io ---------------------------------------------------------------

class MissingFileError(SpeechRiskError):
    pass


class MalformedHeaderError(SpeechRiskError):
    pass


class UnsupportedEncodingError(SpeechRiskError):
    pass


class EmptyBufferError(SpeechRiskError):
    pass


class ZeroTargetRateError(SpeechRiskError):
    pass


# --- segmenter --------------------------------------------------------------

class SchemaViolationError(SpeechRiskError):
    pass


class OverlappingSpansError(SpeechRiskError):
    pass


class SpanOutOfRangeError(SpeechRiskError):
    pass


class BufferTooShortError(SpeechRiskError):
    pass


# --- acoustic features ------------------------------------------------------

class TooFewPeriodsError(SpeechRiskError):
    pass


class NonPositiveAmplitudeError(SpeechRiskError):
    pass


class UnvoicedFrameError(SpeechRiskError):
    pass


class EmptyLldError(SpeechRiskError):
    pass


# --- feature vectors / embeddings -------------------------------------------

class NonFiniteValueError(SpeechRiskError):
    pass


class DimensionMismatchError(SpeechRiskError):
    pass


class EmptyMatrixError(SpeechRiskError):
    pass


class DuplicateFeatureNameError(SpeechRiskError):
    pass


# --- cohort -----------------------------------------------------------------

class UnknownSubjectInFeaturesError(SpeechRiskError):
    pass


class MissingRequiredFieldError(SpeechRiskError):
    pass


class RatingOutOfRangeError(SpeechRiskError):
    pass


# --- learner ----------------------------------------------------------------

class TooFewRowsError(SpeechRiskError):
    pass


class SingleClassTrainingError(SpeechRiskError):
    pass


class NonFiniteInputError(SpeechRiskError):
    pass


class MissingClassError(SpeechRiskError):
    pass


# --- evaluation -------------------------------------------------------------

class TooFewSubjectsError(SpeechRiskError):
    pass


class SingleClassCohortError(SpeechRiskError):
    pass


class EmptyPredictionListError(SpeechRiskError):
    pass


class EmptyScopeError(SpeechRiskError):
    pass


# --- synthesis / config -----------------------------------------------------

class InvalidSpecError(SpeechRiskError):
    pass


class ConfigurationError(SpeechRiskError):
    pass
