"""Raw score model: what the MusicXML reader produces before cleanup.

Durations and onsets are kept as exact :class:`fractions.Fraction` values in
quarter-note units (the reader divides out the per-file ``divisions``
factor), so every later comparison against the rhythm table is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction


@dataclass
class RawEvent:
    """One note, chord group, or rest at a fixed position in a measure.

    ``pitches`` holds every simultaneous MIDI number (empty for a rest);
    polyphony elimination later reduces it to at most one entry.  Grace
    notes carry duration 0 and the ``grace`` flag.
    """

    onset: Fraction
    duration: Fraction
    pitches: list[int] = field(default_factory=list)
    tie_start: bool = False
    tie_stop: bool = False
    grace: bool = False

    def is_rest(self) -> bool:
        return not self.pitches

    def copy(self) -> "RawEvent":
        return replace(self, pitches=list(self.pitches))


@dataclass
class RawHarmony:
    """A chord annotation: root pitch class plus the verbatim kind string.

    The kind string is passed through untouched; mapping it onto one of the
    four supported modes (and rejecting unknown kinds) happens later.
    """

    onset: Fraction
    root: int  # pitch class 0..11, accidentals normalized to sharps
    kind: str

    def copy(self) -> "RawHarmony":
        return replace(self)


@dataclass
class RawMeasure:
    number: int
    time_signature: tuple[int, int] | None  # (numerator, denominator)
    events: list[RawEvent] = field(default_factory=list)
    harmonies: list[RawHarmony] = field(default_factory=list)
    repeat_start: bool = False
    repeat_end: bool = False
    repeat_times: int = 2  # passes through a repeated section
    ending_numbers: tuple[int, ...] = ()  # volta bracket labels, () = none

    def duration(self) -> Fraction:
        """Sum of event durations in quarter notes (grace notes are 0)."""
        return sum((e.duration for e in self.events), Fraction(0))

    def signature_duration(self) -> Fraction | None:
        """Nominal measure length implied by the time signature."""
        if self.time_signature is None:
            return None
        numerator, denominator = self.time_signature
        return Fraction(numerator * 4, denominator)

    def copy(self) -> "RawMeasure":
        return replace(
            self,
            events=[e.copy() for e in self.events],
            harmonies=[h.copy() for h in self.harmonies],
        )


@dataclass
class RawScore:
    """First part of a parsed score: measures in document order."""

    measures: list[RawMeasure] = field(default_factory=list)
    title: str = ""
    source_id: str = ""

    def copy(self) -> "RawScore":
        return RawScore(
            measures=[m.copy() for m in self.measures],
            title=self.title,
            source_id=self.source_id,
        )

    def renumbered(self) -> "RawScore":
        """Same score with measures renumbered contiguously from 1."""
        for i, measure in enumerate(self.measures, start=1):
            measure.number = i
        return self
