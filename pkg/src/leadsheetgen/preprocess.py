"""Score cleanup pipeline: from a raw parsed score to a canonical lead sheet.

Five cleaning passes run in a fixed order, then the flat event/chord/barline
sequence is assembled:

1. :func:`eliminate_polyphony` keeps only the highest pitch of any chord
   group, so the melody stream is monophonic.
2. :func:`ignore_ties` clears tie flags; tied notes become independent
   notes with their original durations.
3. :func:`delete_anacrusis` drops an incomplete pickup measure at the very
   start of the piece.
4. :func:`unfold_repetitions` linearizes repeats and volta endings into a
   single playback-order sequence.
5. :func:`remove_ornaments` deletes grace notes.

Anacrusis detection needs the original measure durations, so it runs before
unfolding; the remaining order is insensitive.  Each pass is pure and
idempotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .encoding import map_mode
from .errors import (
    FormatError,
    LeadSheetError,
    MissingHarmonyError,
    StructureError,
)
from .musicxml import parse_musicxml_file
from .score import RawMeasure, RawScore
from .sheet import BARLINE, LeadSheet, Note, Rest
from .vocab import ChordSymbol, RhythmType


def eliminate_polyphony(score: RawScore) -> RawScore:
    """Reduce every chord group to its highest pitch."""
    out = score.copy()
    for measure in out.measures:
        for event in measure.events:
            if len(event.pitches) > 1:
                event.pitches = [max(event.pitches)]
    return out


def ignore_ties(score: RawScore) -> RawScore:
    """Clear tie flags; durations and event counts stay untouched."""
    out = score.copy()
    for measure in out.measures:
        for event in measure.events:
            event.tie_start = False
            event.tie_stop = False
    return out


def delete_anacrusis(score: RawScore) -> RawScore:
    """Drop measure 1 if its duration falls short of its time signature.

    Applies only at the start of the piece; pickups after repeats are left
    alone.
    """
    if not score.measures:
        return score.copy()
    first = score.measures[0]
    nominal = first.signature_duration()
    if nominal is None:
        raise FormatError("no time signature known for measure 1")
    out = score.copy()
    if first.duration() < nominal:
        del out.measures[0]
        out.renumbered()
    return out


def unfold_repetitions(score: RawScore) -> RawScore:
    """Expand repeat barlines and volta endings into playback order.

    Repeated sections are duplicated in place; on pass ``k`` only the volta
    bracket labeled ``k`` is played (brackets beyond the pass count are
    skipped).  The output carries no repeat or ending markers.
    """
    measures = score.measures
    for measure in measures:
        if measure.ending_numbers and any(n < 1 for n in measure.ending_numbers):
            raise StructureError("ending bracket numbered below 1", measure.number)

    unfolded: list[RawMeasure] = []
    index = 0
    repeat_origin = 0  # where an unmatched backward repeat jumps to
    current_pass = 1
    active_start: int | None = None

    def passes_for(start: int, end: int, times: int) -> int:
        # Volta brackets for this repeat group: those inside the repeated
        # region plus the bracket block immediately following the repeat
        # barline (endings 2, 3, ... live after the jump point).
        while end + 1 < len(measures) and measures[end + 1].ending_numbers:
            end += 1
        voltas = [n for m in measures[start : end + 1] for n in m.ending_numbers]
        return max([times] + voltas)

    while index < len(measures):
        measure = measures[index]
        if measure.repeat_start:
            if active_start is not None and active_start != index:
                raise StructureError("nested repeat start", measure.number)
            if active_start is None:
                active_start = index
                current_pass = 1

        skip = measure.ending_numbers and current_pass not in measure.ending_numbers
        if not skip:
            clean = measure.copy()
            clean.repeat_start = False
            clean.repeat_end = False
            clean.ending_numbers = ()
            clean.repeat_times = 2
            unfolded.append(clean)

        if measure.repeat_end and not skip:
            start = active_start if active_start is not None else repeat_origin
            total = passes_for(start, index, measure.repeat_times)
            if current_pass < total:
                current_pass += 1
                index = start
                continue
            active_start = None
            current_pass = 1
            repeat_origin = index + 1
        index += 1

    out = RawScore(measures=unfolded, title=score.title, source_id=score.source_id)
    return out.renumbered()


def remove_ornaments(score: RawScore) -> RawScore:
    """Delete grace-flagged events; everything else is untouched."""
    out = score.copy()
    for measure in out.measures:
        measure.events = [e for e in measure.events if not e.grace]
    return out


def to_lead_sheet(score: RawScore) -> LeadSheet:
    """Assemble the flat event sequence with forward-filled chords.

    Expects a score that already went through the five cleaning passes.
    The active chord is carried across events and measures until a new
    harmony annotation appears; a barline event closes every measure.

    Raises:
      MissingHarmonyError: no chord annotation at or before the first note.
      UnknownModeError: a harmony kind outside the supported mode table.
      UnsupportedRhythmError: a duration outside the 12 rhythm types.
    """
    events = []
    chord: ChordSymbol | None = None
    for measure in score.measures:
        # Later annotations at the same onset win.
        harmonies = sorted(measure.harmonies, key=lambda h: h.onset)
        cursor = 0
        for event in measure.events:
            while cursor < len(harmonies) and harmonies[cursor].onset <= event.onset:
                harmony = harmonies[cursor]
                chord = ChordSymbol(harmony.root, map_mode(harmony.kind))
                cursor += 1
            if chord is None:
                raise MissingHarmonyError(
                    f"no chord annotation before the first note (measure {measure.number})"
                )
            rhythm = RhythmType.from_duration(event.duration)
            if event.is_rest():
                events.append(Rest(rhythm=rhythm, chord=chord))
            else:
                events.append(Note(pitch=event.pitches[0], rhythm=rhythm, chord=chord))
        # Trailing annotations without an event still update the chord.
        for harmony in harmonies[cursor:]:
            chord = ChordSymbol(harmony.root, map_mode(harmony.kind))
        if measure.events:
            events.append(BARLINE)
    sheet = LeadSheet(events=events, title=score.title, source_id=score.source_id)
    return sheet.validate()


def preprocess_score(score: RawScore) -> LeadSheet:
    """Run the full cleanup pipeline and assemble the lead sheet."""
    score = eliminate_polyphony(score)
    score = ignore_ties(score)
    score = delete_anacrusis(score)
    score = unfold_repetitions(score)
    score = remove_ornaments(score)
    return to_lead_sheet(score)


@dataclass
class SheetReport:
    source: str
    kept: bool
    reason: str = ""
    length: int = 0

    def line(self) -> str:
        if self.kept:
            return f"{self.source}\tkept\tevents={self.length}"
        return f"{self.source}\tdropped\t{self.reason}"


def preprocess_corpus(paths) -> tuple[list[LeadSheet], list[SheetReport]]:
    """Parse and clean every file, keeping what survives.

    Sheets that fail for a known reason (unsupported features, unknown
    chord modes, missing harmony, out-of-vocabulary rhythms, ...) are
    dropped with that reason in the per-sheet report; nothing crashes the
    run.
    """
    sheets: list[LeadSheet] = []
    reports: list[SheetReport] = []
    for path in paths:
        name = Path(path).name
        try:
            sheet = preprocess_score(parse_musicxml_file(path))
        except LeadSheetError as exc:
            reason = f"{type(exc).__name__}: {exc}"
            reports.append(SheetReport(source=name, kept=False, reason=reason))
            continue
        sheets.append(sheet)
        reports.append(SheetReport(source=name, kept=True, length=len(sheet)))
    return sheets, reports


def write_report(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for report in reports:
            handle.write(report.line() + "\n")
