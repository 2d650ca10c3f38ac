"""Exception hierarchy for the lead sheet toolkit.

Every failure mode that callers are expected to handle (dropping a sheet
from a corpus, rejecting a checkpoint, aborting a training run) has its own
type so that batch drivers can report typed reasons instead of matching on
message strings.
"""


class LeadSheetError(Exception):
    """Base class for all toolkit errors."""


class MusicXMLParseError(LeadSheetError):
    """Malformed XML. Carries the (line, column) position when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (line {position[0]}, column {position[1]})"
        super().__init__(message)
        self.position = position


class UnsupportedFeatureError(LeadSheetError):
    """A document uses an element outside the supported MusicXML subset."""

    def __init__(self, element, detail=""):
        self.element = element
        msg = f"unsupported MusicXML element: <{element}>"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class FormatError(LeadSheetError):
    """Structurally valid XML that violates the expected score format."""


class StructureError(LeadSheetError):
    """Unbalanced repeat or ending markers. Names the offending measure."""

    def __init__(self, message, measure=None):
        if measure is not None:
            message = f"{message} (measure {measure})"
        super().__init__(message)
        self.measure = measure


class MissingHarmonyError(LeadSheetError):
    """No chord annotation at or before the first note of a piece."""


class UnknownModeError(LeadSheetError):
    """A harmony kind string outside the supported mode mapping table."""

    def __init__(self, kind):
        super().__init__(f"unknown chord mode: {kind!r}")
        self.kind = kind


class UnsupportedRhythmError(LeadSheetError):
    """A note duration outside the 12 supported rhythm types."""


class InvalidLeadSheetError(LeadSheetError):
    """A lead sheet violating one of its structural invariants."""


class EmptyInputError(LeadSheetError):
    """An operation that requires nonempty input received an empty one."""


class EncodingError(LeadSheetError):
    """A symbol that cannot be mapped into the one-hot vocabularies."""


class DecodeError(LeadSheetError):
    """An encoded sequence that cannot be mapped back to a lead sheet."""


class TranspositionRangeError(LeadSheetError):
    """A semitone shift that would push a pitch outside MIDI range."""

    def __init__(self, semitones, pitch):
        super().__init__(
            f"shift by {semitones:+d} semitones moves pitch {pitch} outside [0, 127]"
        )
        self.semitones = semitones
        self.pitch = pitch


class ShapeError(LeadSheetError):
    """Array arguments whose shapes are inconsistent."""


class NumericFaultError(LeadSheetError):
    """A NaN or infinity appeared in a numeric computation."""


class IncompatibleCheckpointError(LeadSheetError):
    """A checkpoint whose architecture tag, shapes or vocabulary layout
    do not match the model it is being loaded into."""


class ConfigError(LeadSheetError):
    """A missing, unknown, or badly typed configuration key."""

    def __init__(self, key, message):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key
