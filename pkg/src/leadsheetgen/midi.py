"""Standard MIDI File writer for lead sheets.

Produces a format 1 file at 480 ticks per quarter note with two tracks:
the melody line, and block chords (root-position triads around octave 3)
sustained until the harmony changes.  All multi-byte fields are big-endian
as the SMF specification requires.
"""

from __future__ import annotations

import struct
from fractions import Fraction

from .errors import EmptyInputError, FormatError
from .sheet import Barline, LeadSheet, Note, Rest
from .vocab import ChordMode

TICKS_PER_QUARTER = 480

MELODY_CHANNEL = 0
CHORD_CHANNEL = 1
MELODY_VELOCITY = 90
CHORD_VELOCITY = 60
CHORD_BASS_OCTAVE = 48  # triads are voiced upward from C3 + root

_TRIAD_INTERVALS = {
    ChordMode.MAJOR: (0, 4, 7),
    ChordMode.MINOR: (0, 3, 7),
    ChordMode.DIMINISHED: (0, 3, 6),
    ChordMode.AUGMENTED: (0, 4, 8),
}


def export_midi(sheet: LeadSheet, tempo_bpm: float = 120.0) -> bytes:
    """Render a lead sheet as a standard MIDI file (bytes)."""
    if not sheet.events:
        raise EmptyInputError("cannot export an empty lead sheet")
    if not 20 <= tempo_bpm <= 300:
        raise FormatError(f"tempo {tempo_bpm} bpm outside [20, 300]")
    sheet.validate()

    melody_events = [(0, _tempo_meta(tempo_bpm))]
    tick = 0
    for event in sheet.events:
        if isinstance(event, Barline):
            continue
        ticks = _duration_ticks(event.rhythm.duration)
        if isinstance(event, Note):
            melody_events.append((tick, _note_on(MELODY_CHANNEL, event.pitch, MELODY_VELOCITY)))
            melody_events.append((tick + ticks, _note_off(MELODY_CHANNEL, event.pitch)))
        tick += ticks
    total_ticks = tick

    chord_events = []
    for start, end, chord in _chord_segments(sheet, total_ticks):
        for interval in _TRIAD_INTERVALS[chord.mode]:
            pitch = CHORD_BASS_OCTAVE + chord.root + interval
            chord_events.append((start, _note_on(CHORD_CHANNEL, pitch, CHORD_VELOCITY)))
            chord_events.append((end, _note_off(CHORD_CHANNEL, pitch)))

    tracks = [_track_bytes(melody_events), _track_bytes(chord_events)]
    header = struct.pack(">4sIHHH", b"MThd", 6, 1, len(tracks), TICKS_PER_QUARTER)
    return header + b"".join(tracks)


def export_midi_file(sheet: LeadSheet, path, tempo_bpm: float = 120.0) -> None:
    with open(path, "wb") as handle:
        handle.write(export_midi(sheet, tempo_bpm))


def _duration_ticks(quarters: Fraction) -> int:
    ticks = quarters * TICKS_PER_QUARTER
    # All 12 rhythm durations are multiples of 1/480 quarter, so this is exact.
    if ticks.denominator != 1:
        raise FormatError(f"duration {quarters} quarters is not tick-exact")
    return int(ticks)


def _chord_segments(sheet: LeadSheet, total_ticks: int):
    """Yield (start_tick, end_tick, chord) runs of constant harmony."""
    segments = []
    tick = 0
    current = None
    start = 0
    for event in sheet.events:
        if isinstance(event, Barline):
            continue
        if event.chord != current:
            if current is not None:
                segments.append((start, tick, current))
            current = event.chord
            start = tick
        tick += _duration_ticks(event.rhythm.duration)
    if current is not None:
        segments.append((start, total_ticks, current))
    return segments


def _note_on(channel: int, pitch: int, velocity: int) -> bytes:
    return bytes((0x90 | channel, pitch, velocity))


def _note_off(channel: int, pitch: int) -> bytes:
    return bytes((0x80 | channel, pitch, 0))


def _tempo_meta(tempo_bpm: float) -> bytes:
    microseconds = int(round(60_000_000 / tempo_bpm))
    return bytes((0xFF, 0x51, 0x03)) + microseconds.to_bytes(3, "big")


def _end_of_track() -> bytes:
    return bytes((0xFF, 0x2F, 0x00))


def _variable_length(value: int) -> bytes:
    """SMF variable-length quantity: 7 bits per byte, high bit = continue."""
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


def _track_bytes(events: list[tuple[int, bytes]]) -> bytes:
    """Delta-encode (absolute_tick, message) pairs into one MTrk chunk.

    Events are sorted by tick with note-offs before note-ons at the same
    tick, so repeated pitches never overlap.
    """
    ordered = sorted(enumerate(events), key=lambda item: (item[1][0], item[1][1][0] & 0xF0 != 0x80, item[0]))
    body = bytearray()
    previous = 0
    for _, (tick, message) in ordered:
        body += _variable_length(tick - previous)
        body += message
        previous = tick
    body += _variable_length(0)
    body += _end_of_track()
    return struct.pack(">4sI", b"MTrk", len(body)) + bytes(body)
