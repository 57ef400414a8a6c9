"""Exception types raised across the toolbox.

Errors are grouped by the stage that raises them; everything inherits from
:class:`SpeechForgeError` so callers can catch the whole family at once.
"""


class SpeechForgeError(Exception):
    """Base class for every toolbox error."""


# ---------------------------------------------------------------------------
# text normalization

class ConfigError(SpeechForgeError):
    """A config file or config object is structurally invalid."""


class EmptyDocument(SpeechForgeError):
    """The raw text contains no alignable content after normalization."""


# ---------------------------------------------------------------------------
# log-probability files

class BadMagic(SpeechForgeError):
    """The file does not start with the log-prob magic bytes."""


class UnsupportedVersion(SpeechForgeError):
    """The log-prob file declares a format version this reader cannot handle."""


class TruncatedFile(SpeechForgeError):
    """The file ends before the declared payload is complete."""


class DimensionOverflow(SpeechForgeError):
    """Header dimensions are out of the accepted range."""


# ---------------------------------------------------------------------------
# tokenization and alignment

class OovCharacter(SpeechForgeError):
    """A character has no token id (strict tokenization only)."""

    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"out-of-vocabulary character {char!r} at position {position}")


class TextLongerThanAudio(SpeechForgeError):
    """More characters than frames: no monotone path exists."""


class EmptyUtteranceList(SpeechForgeError):
    """Nothing to align: the utterance list is empty or contains an empty utterance."""


class MismatchedRunShapes(SpeechForgeError):
    """Alignment runs passed to consensus disagree on the utterance count."""


# ---------------------------------------------------------------------------
# audio

class NotWav(SpeechForgeError):
    """The file is not a RIFF/WAVE container."""


class UnsupportedEncoding(SpeechForgeError):
    """The WAV encoding is neither 16-bit PCM nor 32-bit IEEE float."""


class TruncatedData(SpeechForgeError):
    """The WAV data chunk is shorter than its declared size."""


class SegmentOutOfRange(SpeechForgeError):
    """A segment's time span lies outside the clip."""


class EmptyClip(SpeechForgeError):
    """The operation needs at least one sample."""


# ---------------------------------------------------------------------------
# metrics

class EmptyReference(SpeechForgeError):
    """The reference text tokenizes to zero words."""


class EmptyInput(SpeechForgeError):
    """An aggregate was requested over an empty collection."""


# ---------------------------------------------------------------------------
# manifests, segment files, filtering, splitting

class MalformedLine(SpeechForgeError):
    """A line of a manifest or segments file cannot be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class MissingRequiredField(SpeechForgeError):
    """A manifest line lacks one of the required keys."""

    def __init__(self, line_number: int, field: str):
        self.line_number = line_number
        self.field = field
        super().__init__(f"line {line_number}: missing required field {field!r}")


class IncompatibleRule(SpeechForgeError):
    """A filter rule combines an operator with an incompatible value type."""


class EmptyDataset(SpeechForgeError):
    """Statistics were requested over zero entries."""


class MissingGroupKey(SpeechForgeError):
    """An entry lacks the group field required for a grouped split."""


class KExceedsGroups(SpeechForgeError):
    """More folds were requested than distinct groups exist."""


# ---------------------------------------------------------------------------
# explorer queries

class UnknownField(SpeechForgeError):
    """The requested sort or filter field is not present in the index."""


class BadPage(SpeechForgeError):
    """Page number or page size is out of range."""


class NotFound(SpeechForgeError):
    """No sample with the requested id."""


class AudioMissing(SpeechForgeError):
    """The sample's audio file cannot be located."""
