"""Symbol vocabularies: rhythm types, chord symbols, and vector layouts.

Three parallel vocabularies cover the three streams of a lead sheet:

* chords: 12 roots x 4 modes = 48 symbols, plus a barline, in a
  49-dimensional one-hot layout;
* rhythms: the 12 supported note values plus a barline, 13 dimensions;
* melody: the 128 MIDI pitches plus a rest and a barline, 130 dimensions.

The barline always sits at the last index of each vocabulary.  The chord
index layout is ``root * 4 + mode`` with mode ordinals major=0, minor=1,
diminished=2, augmented=3.  These layouts are a convention of this package
(checkpoints record a hash of them, see :func:`layout_hash`).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import UnsupportedRhythmError

# One-hot vector widths for the three streams.
CHORD_DIM = 49
RHYTHM_DIM = 13
MELODY_DIM = 130

# Barline index: last dimension of each vocabulary.
CHORD_BARLINE = CHORD_DIM - 1    # 48
RHYTHM_BARLINE = RHYTHM_DIM - 1  # 12
MELODY_REST = 128
MELODY_BARLINE = MELODY_DIM - 1  # 129

# Concatenated widths used by the models.
TEMPLATE_DIM = CHORD_DIM + RHYTHM_DIM              # 62
FULL_DIM = CHORD_DIM + RHYTHM_DIM + MELODY_DIM     # 192

PITCH_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]


class RhythmType(Enum):
    """The 12 supported note values, ordered by vocabulary index.

    ``duration`` is the exact length in quarter notes as a Fraction, so
    triplets and dots never suffer floating point rounding.
    """

    THIRTY_SECOND = (0, Fraction(1, 8))
    DOTTED_THIRTY_SECOND = (1, Fraction(3, 16))
    SIXTEENTH = (2, Fraction(1, 4))
    EIGHTH_TRIPLET = (3, Fraction(1, 3))
    EIGHTH = (4, Fraction(1, 2))
    QUARTER_TRIPLET = (5, Fraction(2, 3))
    DOTTED_EIGHTH = (6, Fraction(3, 4))
    QUARTER = (7, Fraction(1, 1))
    DOTTED_QUARTER = (8, Fraction(3, 2))
    HALF = (9, Fraction(2, 1))
    DOTTED_HALF = (10, Fraction(3, 1))
    WHOLE = (11, Fraction(4, 1))

    def __init__(self, index: int, duration: Fraction):
        self.index = index
        self.duration = duration

    @classmethod
    def from_index(cls, index: int) -> "RhythmType":
        try:
            return _RHYTHM_BY_INDEX[index]
        except KeyError:
            raise UnsupportedRhythmError(f"no rhythm type with index {index}")

    @classmethod
    def from_duration(cls, duration: Fraction) -> "RhythmType":
        """Look up a rhythm type by its exact quarter-note duration."""
        try:
            return _RHYTHM_BY_DURATION[Fraction(duration)]
        except KeyError:
            raise UnsupportedRhythmError(
                f"duration {duration} quarter notes is not one of the "
                f"{len(cls)} supported rhythm types"
            )


_RHYTHM_BY_INDEX = {r.index: r for r in RhythmType}
_RHYTHM_BY_DURATION = {r.duration: r for r in RhythmType}


class ChordMode(Enum):
    MAJOR = 0
    MINOR = 1
    DIMINISHED = 2
    AUGMENTED = 3


# Readable suffix per mode, used when printing chord names.
_MODE_SUFFIX = {
    ChordMode.MAJOR: "",
    ChordMode.MINOR: "m",
    ChordMode.DIMINISHED: "dim",
    ChordMode.AUGMENTED: "aug",
}


@dataclass(frozen=True)
class ChordSymbol:
    """A chord: root pitch class (C=0 .. B=11, sharps only) and mode."""

    root: int
    mode: ChordMode

    def __post_init__(self):
        if not 0 <= self.root <= 11:
            raise ValueError(f"chord root {self.root} outside [0, 11]")
        if not isinstance(self.mode, ChordMode):
            raise TypeError(f"mode must be ChordMode, got {self.mode!r}")

    @property
    def index(self) -> int:
        """Position in the 49-dim chord vocabulary (barline excluded)."""
        return self.root * 4 + self.mode.value

    @classmethod
    def from_index(cls, index: int) -> "ChordSymbol":
        if not 0 <= index < CHORD_BARLINE:
            raise ValueError(f"chord index {index} outside [0, {CHORD_BARLINE})")
        return cls(root=index // 4, mode=ChordMode(index % 4))

    def transposed(self, semitones: int) -> "ChordSymbol":
        return ChordSymbol((self.root + semitones) % 12, self.mode)

    def name(self) -> str:
        return PITCH_NAMES[self.root] + _MODE_SUFFIX[self.mode]

    def __str__(self) -> str:
        return self.name()


# MusicXML "kind" strings mapped onto the four supported modes.  Harmony
# kinds outside this table cause the whole sheet to be rejected upstream.
MODE_MAP: dict[str, ChordMode] = {
    "6": ChordMode.MAJOR,
    "7": ChordMode.MAJOR,
    "9": ChordMode.MAJOR,
    "augmented": ChordMode.AUGMENTED,
    "augmented-7": ChordMode.AUGMENTED,
    "augmented-9": ChordMode.AUGMENTED,
    "diminished": ChordMode.DIMINISHED,
    "diminished-7": ChordMode.DIMINISHED,
    "dominant": ChordMode.MAJOR,
    "dominant-11": ChordMode.MAJOR,
    "dominant-13": ChordMode.MAJOR,
    "dominant-7": ChordMode.MAJOR,
    "dominant-9": ChordMode.MAJOR,
    "half-diminished": ChordMode.DIMINISHED,
    "major": ChordMode.MAJOR,
    "major-13": ChordMode.MAJOR,
    "major-6": ChordMode.MAJOR,
    "major-6-9": ChordMode.MAJOR,
    "major-7": ChordMode.MAJOR,
    "major-9": ChordMode.MAJOR,
    "major-minor": ChordMode.MAJOR,
    "minor": ChordMode.MINOR,
    "minor-11": ChordMode.MINOR,
    "minor-13": ChordMode.MINOR,
    "minor-6": ChordMode.MINOR,
    "minor-7": ChordMode.MINOR,
    "minor-7-b5": ChordMode.DIMINISHED,
    "minor-9": ChordMode.MINOR,
    "minor-major": ChordMode.MINOR,
    "minor-major-7": ChordMode.MINOR,
    "power": ChordMode.MAJOR,
    "sus2": ChordMode.MAJOR,
    "sus4": ChordMode.MAJOR,
    "sus4-7": ChordMode.MAJOR,
}


def layout_hash() -> int:
    """A 64-bit fingerprint of the vocabulary layouts.

    Stored in every checkpoint header; loading a checkpoint produced under
    a different layout is rejected.  Covers vector widths, index ordering,
    and the barline placement convention.
    """
    description = ";".join(
        [
            f"chord_dim={CHORD_DIM}",
            "chord=root*4+mode",
            "modes=" + ",".join(m.name.lower() for m in ChordMode),
            f"rhythm_dim={RHYTHM_DIM}",
            "rhythms=" + ",".join(f"{r.name.lower()}:{r.duration}" for r in RhythmType),
            f"melody_dim={MELODY_DIM}",
            f"rest={MELODY_REST}",
            "barline=last",
        ]
    )
    digest = hashlib.sha256(description.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little")
