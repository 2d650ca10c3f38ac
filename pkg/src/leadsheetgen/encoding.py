"""Symbol-to-vector encoding and the on-disk corpus format.

A lead sheet becomes three aligned index sequences (chord, rhythm, melody).
Index layouts live in :mod:`leadsheetgen.vocab`; this module converts events
to indices and back, applies semitone transposition, and reads/writes the
binary corpus file (indices on disk, dense one-hots only in memory).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DecodeError,
    EncodingError,
    FormatError,
    TranspositionRangeError,
    UnknownModeError,
)
from .sheet import BARLINE, Barline, LeadSheet, Note, Rest
from .vocab import (
    CHORD_BARLINE,
    CHORD_DIM,
    MELODY_BARLINE,
    MELODY_DIM,
    MELODY_REST,
    MODE_MAP,
    RHYTHM_BARLINE,
    RHYTHM_DIM,
    ChordMode,
    ChordSymbol,
    RhythmType,
)

CORPUS_MAGIC = b"LSEC"
CORPUS_VERSION = 1


def map_mode(kind: str) -> ChordMode:
    """Map a MusicXML harmony kind string onto one of the four modes.

    Kinds outside the supported table are rejected; callers drop the whole
    sheet in that case.
    """
    try:
        return MODE_MAP[kind]
    except KeyError:
        raise UnknownModeError(kind)


@dataclass
class EncodedSequence:
    """Aligned chord/rhythm/melody index arrays for one lead sheet.

    A barline occupies the last index of every vocabulary and always
    appears in all three streams at once.
    """

    chords: np.ndarray
    rhythms: np.ndarray
    melodies: np.ndarray

    def __post_init__(self):
        self.chords = np.asarray(self.chords, dtype=np.int16)
        self.rhythms = np.asarray(self.rhythms, dtype=np.int16)
        self.melodies = np.asarray(self.melodies, dtype=np.int16)

    def __len__(self) -> int:
        return len(self.chords)

    def validate(self) -> "EncodedSequence":
        if not (len(self.chords) == len(self.rhythms) == len(self.melodies)):
            raise DecodeError("chord/rhythm/melody streams differ in length")
        for name, values, dim in (
            ("chord", self.chords, CHORD_DIM),
            ("rhythm", self.rhythms, RHYTHM_DIM),
            ("melody", self.melodies, MELODY_DIM),
        ):
            if len(values) and (values.min() < 0 or values.max() >= dim):
                raise DecodeError(f"{name} index outside [0, {dim})")
        barlines = self.chords == CHORD_BARLINE
        if not (
            np.array_equal(barlines, self.rhythms == RHYTHM_BARLINE)
            and np.array_equal(barlines, self.melodies == MELODY_BARLINE)
        ):
            raise DecodeError("barlines are not synchronized across streams")
        return self

    def onehots(self, dtype=np.float32) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense one-hot matrices, shapes (n, 49), (n, 13), (n, 130)."""
        return (
            one_hot(self.chords, CHORD_DIM, dtype),
            one_hot(self.rhythms, RHYTHM_DIM, dtype),
            one_hot(self.melodies, MELODY_DIM, dtype),
        )

    @classmethod
    def from_onehots(cls, chords, rhythms, melodies) -> "EncodedSequence":
        """Build from dense vectors, verifying each row is a strict one-hot."""
        return cls(
            chords=_onehot_to_index(chords, "chord"),
            rhythms=_onehot_to_index(rhythms, "rhythm"),
            melodies=_onehot_to_index(melodies, "melody"),
        ).validate()


def one_hot(indices, dim: int, dtype=np.float32) -> np.ndarray:
    """Index array -> dense one-hot matrix. Negative indices (padding)
    become all-zero rows."""
    indices = np.asarray(indices)
    out = np.zeros((len(indices), dim), dtype=dtype)
    valid = indices >= 0
    out[np.nonzero(valid)[0], indices[valid]] = 1
    return out


def _onehot_to_index(vectors, name: str) -> np.ndarray:
    vectors = np.asarray(vectors)
    if vectors.ndim != 2:
        raise DecodeError(f"{name} one-hots must be a 2-d array")
    ones = vectors == 1
    if not np.array_equal(ones.sum(axis=1), np.ones(len(vectors))) or not np.all(
        (vectors == 0) | ones
    ):
        raise DecodeError(f"{name} rows are not strict one-hot vectors")
    return ones.argmax(axis=1).astype(np.int16)


def encode(sheet: LeadSheet) -> EncodedSequence:
    """Lead sheet -> aligned index sequences."""
    chords = np.empty(len(sheet.events), dtype=np.int16)
    rhythms = np.empty(len(sheet.events), dtype=np.int16)
    melodies = np.empty(len(sheet.events), dtype=np.int16)
    for i, event in enumerate(sheet.events):
        if isinstance(event, Barline):
            chords[i], rhythms[i], melodies[i] = (
                CHORD_BARLINE,
                RHYTHM_BARLINE,
                MELODY_BARLINE,
            )
        elif isinstance(event, Note):
            chords[i] = event.chord.index
            rhythms[i] = event.rhythm.index
            melodies[i] = event.pitch
        elif isinstance(event, Rest):
            chords[i] = event.chord.index
            rhythms[i] = event.rhythm.index
            melodies[i] = MELODY_REST
        else:
            raise EncodingError(f"cannot encode event {event!r}")
    return EncodedSequence(chords, rhythms, melodies)


def decode(seq: EncodedSequence, title: str = "", source_id: str = "") -> LeadSheet:
    """Index sequences -> lead sheet; exact inverse of :func:`encode`."""
    seq.validate()
    events = []
    for chord_idx, rhythm_idx, melody_idx in zip(seq.chords, seq.rhythms, seq.melodies):
        if chord_idx == CHORD_BARLINE:
            events.append(BARLINE)
            continue
        chord = ChordSymbol.from_index(int(chord_idx))
        rhythm = RhythmType.from_index(int(rhythm_idx))
        if melody_idx == MELODY_REST:
            events.append(Rest(rhythm=rhythm, chord=chord))
        else:
            events.append(Note(pitch=int(melody_idx), rhythm=rhythm, chord=chord))
    return LeadSheet(events=events, title=title, source_id=source_id)


def transpose(seq: EncodedSequence, semitones: int) -> EncodedSequence:
    """Shift melody pitches and chord roots by ``semitones``.

    Pitches shift chromatically; chord roots wrap modulo 12 with the mode
    unchanged; rests, barlines, and the rhythm stream are untouched.

    Raises:
      TranspositionRangeError: a shifted pitch would leave [0, 127]; the
        caller excludes that shift for this sheet instead of clamping.
    """
    if not -12 <= semitones <= 12:
        raise ValueError(f"shift {semitones} outside [-12, 12]")
    melodies = seq.melodies.copy()
    pitched = melodies < MELODY_REST
    if semitones and pitched.any():
        shifted = melodies[pitched].astype(np.int32) + semitones
        if shifted.min() < 0 or shifted.max() > 127:
            bad = int(melodies[pitched].max() if semitones > 0 else melodies[pitched].min())
            raise TranspositionRangeError(semitones, bad)
        melodies[pitched] = shifted.astype(np.int16)
    chords = seq.chords.copy()
    symbol = chords < CHORD_BARLINE
    if semitones:
        roots = (chords[symbol] // 4 + semitones) % 12
        chords[symbol] = roots * 4 + chords[symbol] % 4
    return EncodedSequence(chords=chords, rhythms=seq.rhythms.copy(), melodies=melodies)


def valid_shifts(melodies: np.ndarray) -> list[int]:
    """Semitone shifts in [-12, 12] that keep every pitch inside MIDI range."""
    pitched = melodies[(melodies >= 0) & (melodies < MELODY_REST)]
    if len(pitched) == 0:
        return list(range(-12, 13))
    low, high = int(pitched.min()), int(pitched.max())
    return [k for k in range(-12, 13) if low + k >= 0 and high + k <= 127]


# ---------------------------------------------------------------------------
# Corpus file: header {magic, version u32, sheet count u32}, then per sheet
# {length u32, length x 3 u16 indices (chord, rhythm, melody per step)}.
# Little-endian throughout.


def save_corpus(sequences, path) -> None:
    with open(path, "wb") as handle:
        handle.write(struct.pack("<4sII", CORPUS_MAGIC, CORPUS_VERSION, len(sequences)))
        for seq in sequences:
            seq.validate()
            handle.write(struct.pack("<I", len(seq)))
            interleaved = np.empty(len(seq) * 3, dtype="<u2")
            interleaved[0::3] = seq.chords
            interleaved[1::3] = seq.rhythms
            interleaved[2::3] = seq.melodies
            handle.write(interleaved.tobytes())


def load_corpus(path) -> list[EncodedSequence]:
    with open(path, "rb") as handle:
        data = handle.read()
    header = struct.calcsize("<4sII")
    if len(data) < header:
        raise FormatError("corpus file truncated before header")
    magic, version, count = struct.unpack_from("<4sII", data)
    if magic != CORPUS_MAGIC:
        raise FormatError(f"bad corpus magic {magic!r}")
    if version != CORPUS_VERSION:
        raise FormatError(f"unsupported corpus version {version}")
    sequences = []
    offset = header
    for _ in range(count):
        if offset + 4 > len(data):
            raise FormatError("corpus file truncated in sheet header")
        (length,) = struct.unpack_from("<I", data, offset)
        offset += 4
        end = offset + length * 3 * 2
        if end > len(data):
            raise FormatError("corpus file truncated in sheet body")
        flat = np.frombuffer(data[offset:end], dtype="<u2").astype(np.int16)
        offset = end
        sequences.append(
            EncodedSequence(
                chords=flat[0::3], rhythms=flat[1::3], melodies=flat[2::3]
            ).validate()
        )
    return sequences
