"""The lead sheet data model.

A lead sheet is a flat, ordered sequence of events sharing one time scale:
monophonic notes, rests, and barlines.  Every note and rest carries the
chord that is active at that moment (the chord repeats across events until
the harmony changes), and barlines appear as first-class events shared by
the chord, rhythm and melody streams alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidLeadSheetError
from .vocab import ChordSymbol, RhythmType


@dataclass(frozen=True)
class Note:
    pitch: int  # MIDI number, 0..127
    rhythm: RhythmType
    chord: ChordSymbol

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside MIDI range [0, 127]")


@dataclass(frozen=True)
class Rest:
    rhythm: RhythmType
    chord: ChordSymbol


@dataclass(frozen=True)
class Barline:
    pass


BARLINE = Barline()

Event = Note | Rest | Barline


@dataclass
class LeadSheet:
    """An ordered sequence of :data:`Event` values plus identifying text.

    Structural invariants (checked by :meth:`validate`):

    * monophonic: every ``Note`` holds exactly one pitch;
    * no two consecutive ``Barline`` events;
    * a nonempty sheet starts with a note or rest and ends with a barline,
      so every event belongs to a complete measure.
    """

    events: list[Event] = field(default_factory=list)
    title: str = ""
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def validate(self) -> "LeadSheet":
        """Raise :class:`InvalidLeadSheetError` on any broken invariant."""
        prev_barline = False
        for i, event in enumerate(self.events):
            if isinstance(event, Barline):
                if prev_barline:
                    raise InvalidLeadSheetError(
                        f"consecutive barlines at events {i - 1} and {i}"
                    )
                prev_barline = True
            elif isinstance(event, (Note, Rest)):
                prev_barline = False
            else:
                raise InvalidLeadSheetError(f"unknown event type at {i}: {event!r}")
        if self.events:
            if isinstance(self.events[0], Barline):
                raise InvalidLeadSheetError("sheet starts with a barline")
            if not isinstance(self.events[-1], Barline):
                raise InvalidLeadSheetError("sheet does not end with a barline")
        return self

    def bar_count(self) -> int:
        return sum(1 for e in self.events if isinstance(e, Barline))

    def bars(self) -> list[list[Event]]:
        """Split into per-measure event lists (barlines removed).

        A trailing segment without a closing barline is kept, so this is
        total even on sheets that fail :meth:`validate`.
        """
        bars: list[list[Event]] = []
        current: list[Event] = []
        for event in self.events:
            if isinstance(event, Barline):
                bars.append(current)
                current = []
            else:
                current.append(event)
        if current:
            bars.append(current)
        return bars

    def duration_quarters(self) -> Fraction:
        """Total sounding duration in quarter notes (barlines are free)."""
        total = Fraction(0)
        for event in self.events:
            if isinstance(event, (Note, Rest)):
                total += event.rhythm.duration
        return total
