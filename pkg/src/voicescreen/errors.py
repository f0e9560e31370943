"""Exception hierarchy shared by all pipeline stages."""


class VoicescreenError(Exception):
    """Base class for all errors raised by this package."""


# --- audio I/O ---

class MalformedHeader(VoicescreenError):
    pass


class UnsupportedEncoding(VoicescreenError):
    pass


class EmptyAudio(VoicescreenError):
    pass


class AudioTooShort(VoicescreenError):
    pass


# --- segmentation ---

class InsufficientAudio(VoicescreenError):
    pass


class InsufficientVoiced(VoicescreenError):
    pass


# --- low-level descriptors ---

class FrameTooShort(VoicescreenError):
    pass


class TooFewPeriods(VoicescreenError):
    pass


class NonPositiveAmplitude(VoicescreenError):
    pass


class UnvoicedFrame(VoicescreenError):
    pass


class SilentFrame(VoicescreenError):
    pass


# --- feature sets ---

class EmptyContour(VoicescreenError):
    pass


class BadMagic(VoicescreenError):
    pass


class DimMismatch(VoicescreenError):
    pass


class NonFiniteValue(VoicescreenError):
    pass


# --- models ---

class TooFewRows(VoicescreenError):
    pass


class SingleClassData(VoicescreenError):
    pass


class DimensionMismatch(VoicescreenError):
    pass


# --- evaluation ---

class EmptyVote(VoicescreenError):
    pass


class EmptyCounts(VoicescreenError):
    pass


class TooFewParticipants(VoicescreenError):
    pass


class FoldCollapse(VoicescreenError):
    pass


# --- manifests / CLI ---

class SchemaViolation(VoicescreenError):
    pass


class DuplicateId(VoicescreenError):
    pass


class MissingFile(VoicescreenError):
    pass


class UnknownLabel(VoicescreenError):
    pass


class IoFailure(VoicescreenError):
    pass
