"""MusicXML subset reader and writer.

Only the elements a lead sheet needs are supported: ``score-partwise``
documents with one melody part, time signatures, notes (pitch, rest,
duration, tie, grace, chord grouping), ``harmony`` chord annotations, and
repeat/ending barlines.  Anything else that would change pitch or duration
semantics raises :class:`UnsupportedFeatureError` instead of being silently
misread; purely visual elements are ignored.

Durations are normalized out of the per-file ``divisions`` unit into exact
quarter-note fractions at parse time.
"""

from __future__ import annotations

import io
import math
import xml.etree.ElementTree as ET
from fractions import Fraction

from .errors import (
    EmptyInputError,
    FormatError,
    MusicXMLParseError,
    UnsupportedFeatureError,
)
from .score import RawEvent, RawHarmony, RawMeasure, RawScore
from .sheet import Barline, LeadSheet, Note, Rest
from .vocab import ChordMode, RhythmType

_STEP_TO_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

# Sharp-only spelling for each pitch class, used on export.
_PC_TO_STEP_ALTER = {
    0: ("C", 0), 1: ("C", 1), 2: ("D", 0), 3: ("D", 1), 4: ("E", 0), 5: ("F", 0),
    6: ("F", 1), 7: ("G", 0), 8: ("G", 1), 9: ("A", 0), 10: ("A", 1), 11: ("B", 0),
}

_MODE_TO_KIND = {
    ChordMode.MAJOR: "major",
    ChordMode.MINOR: "minor",
    ChordMode.DIMINISHED: "diminished",
    ChordMode.AUGMENTED: "augmented",
}

# MusicXML <type> names and tuplet ratios per rhythm type, for readable
# output. Reparsing relies on <duration> alone.
_RHYTHM_NOTATION = {
    RhythmType.THIRTY_SECOND: ("32nd", 0, None),
    RhythmType.DOTTED_THIRTY_SECOND: ("32nd", 1, None),
    RhythmType.SIXTEENTH: ("16th", 0, None),
    RhythmType.EIGHTH_TRIPLET: ("eighth", 0, (3, 2)),
    RhythmType.EIGHTH: ("eighth", 0, None),
    RhythmType.QUARTER_TRIPLET: ("quarter", 0, (3, 2)),
    RhythmType.DOTTED_EIGHTH: ("eighth", 1, None),
    RhythmType.QUARTER: ("quarter", 0, None),
    RhythmType.DOTTED_QUARTER: ("quarter", 1, None),
    RhythmType.HALF: ("half", 0, None),
    RhythmType.DOTTED_HALF: ("half", 1, None),
    RhythmType.WHOLE: ("whole", 0, None),
}

# Note children that never change what sounds; skipped without complaint.
_IGNORED_NOTE_CHILDREN = {
    "voice", "type", "stem", "staff", "beam", "notations", "lyric", "dot",
    "accidental", "time-modification", "instrument", "notehead", "print-object",
    "duration", "pitch", "rest", "tie", "grace", "chord", "cue",
}

# Measure children handled elsewhere or safe to ignore.
_IGNORED_MEASURE_CHILDREN = {"print", "attributes", "note", "harmony", "barline", "direction"}


def parse_musicxml(source, source_id: str = "") -> RawScore:
    """Parse an uncompressed MusicXML document into a :class:`RawScore`.

    ``source`` may be bytes or a binary file object.  Only the first part
    of the score is read.

    Raises:
      MusicXMLParseError: the document is not well-formed XML.
      UnsupportedFeatureError: an element outside the supported subset
        would change pitch, duration, or playback-order semantics.
      FormatError: well-formed XML that is not a usable partwise score
        (missing divisions, unreadable pitch, ...).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, str):
        source = source.encode("utf-8")
    if not source:
        raise EmptyInputError("empty MusicXML document")
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        raise MusicXMLParseError(str(exc), position=exc.position) from exc

    if root.tag == "score-timewise":
        raise UnsupportedFeatureError("score-timewise", "only score-partwise is supported")
    if root.tag != "score-partwise":
        raise FormatError(f"root element is <{root.tag}>, expected <score-partwise>")

    title = _find_text(root, "work/work-title") or _find_text(root, "movement-title") or ""

    parts = root.findall("part")
    if not parts:
        raise FormatError("document contains no <part>")

    state = _ParserState()
    measures = [
        _parse_measure(element, number, state)
        for number, element in enumerate(parts[0].findall("measure"), start=1)
    ]
    return RawScore(measures=measures, title=title, source_id=source_id)


def parse_musicxml_file(path) -> RawScore:
    with open(path, "rb") as handle:
        return parse_musicxml(handle, source_id=str(path))


class _ParserState:
    """Divisions and time signature persist across measures."""

    def __init__(self):
        self.divisions: int | None = None
        self.time_signature: tuple[int, int] | None = None


def _parse_measure(element: ET.Element, number: int, state: _ParserState) -> RawMeasure:
    measure = RawMeasure(number=number, time_signature=state.time_signature)
    position = Fraction(0)

    for child in element:
        if child.tag == "attributes":
            _parse_attributes(child, state)
            measure.time_signature = state.time_signature
        elif child.tag == "note":
            position = _parse_note(child, measure, position, state)
        elif child.tag == "harmony":
            measure.harmonies.append(_parse_harmony(child, position))
        elif child.tag == "barline":
            _parse_barline(child, measure)
        elif child.tag == "direction":
            _check_direction(child)
        elif child.tag in ("backup", "forward"):
            raise UnsupportedFeatureError(child.tag, "multi-voice positioning")
        elif child.tag not in _IGNORED_MEASURE_CHILDREN:
            # Unknown measure-level elements are visual or textual; skip.
            pass
    return measure


def _parse_attributes(element: ET.Element, state: _ParserState) -> None:
    divisions = _find_text(element, "divisions")
    if divisions is not None:
        value = int(divisions)
        if value <= 0:
            raise FormatError(f"divisions must be positive, got {value}")
        state.divisions = value
    time = element.find("time")
    if time is not None:
        beats = _find_text(time, "beats")
        beat_type = _find_text(time, "beat-type")
        if beats is None or beat_type is None:
            raise FormatError("<time> without <beats>/<beat-type>")
        state.time_signature = (int(beats), int(beat_type))


def _parse_note(
    element: ET.Element, measure: RawMeasure, position: Fraction, state: _ParserState
) -> Fraction:
    """Parse one <note>, append or merge it, and return the new position."""
    if element.find("unpitched") is not None:
        raise UnsupportedFeatureError("unpitched", "percussion notes")
    if element.find("cue") is not None:
        raise UnsupportedFeatureError("cue", "silent cue notes")

    is_grace = element.find("grace") is not None
    is_chorded = element.find("chord") is not None
    rest = element.find("rest") is not None

    pitch = None
    if not rest:
        pitch_el = element.find("pitch")
        if pitch_el is None:
            raise FormatError("<note> has neither <pitch> nor <rest>")
        pitch = _parse_pitch(pitch_el)

    if is_grace:
        duration = Fraction(0)
    else:
        duration_text = _find_text(element, "duration")
        if duration_text is None:
            raise FormatError("<note> without <duration>")
        if state.divisions is None:
            raise FormatError("note duration encountered before <divisions>")
        duration = Fraction(int(duration_text), state.divisions)
        if duration <= 0:
            raise FormatError(f"non-positive note duration {duration_text}")

    tie_start = any(t.get("type") == "start" for t in element.findall("tie"))
    tie_stop = any(t.get("type") == "stop" for t in element.findall("tie"))

    if is_chorded and not rest and measure.events:
        # Part of the previous event's chord group; shares its duration and
        # does not advance the position.
        group = measure.events[-1]
        if pitch is not None:
            group.pitches.append(pitch)
        group.tie_start = group.tie_start or tie_start
        group.tie_stop = group.tie_stop or tie_stop
        return position

    event = RawEvent(
        onset=position,
        duration=duration,
        pitches=[] if pitch is None else [pitch],
        tie_start=tie_start,
        tie_stop=tie_stop,
        grace=is_grace,
    )
    measure.events.append(event)
    return position + duration


def _parse_pitch(element: ET.Element) -> int:
    step = _find_text(element, "step")
    octave = _find_text(element, "octave")
    if step is None or octave is None:
        raise FormatError("<pitch> without <step>/<octave>")
    if step not in _STEP_TO_PC:
        raise FormatError(f"unknown pitch step {step!r}")
    alter = int(round(float(_find_text(element, "alter") or 0)))
    midi = 12 * (int(octave) + 1) + _STEP_TO_PC[step] + alter
    if not 0 <= midi <= 127:
        raise FormatError(f"pitch {step}{octave} alter {alter} outside MIDI range")
    return midi


def _parse_harmony(element: ET.Element, position: Fraction) -> RawHarmony:
    root = element.find("root")
    if root is None:
        raise FormatError("<harmony> without <root>")
    step = _find_text(root, "root-step")
    if step is None or step not in _STEP_TO_PC:
        raise FormatError(f"harmony root step {step!r} unreadable")
    alter = int(round(float(_find_text(root, "root-alter") or 0)))
    pitch_class = (_STEP_TO_PC[step] + alter) % 12
    kind = (_find_text(element, "kind") or "").strip()
    return RawHarmony(onset=position, root=pitch_class, kind=kind)


def _parse_barline(element: ET.Element, measure: RawMeasure) -> None:
    repeat = element.find("repeat")
    if repeat is not None:
        direction = repeat.get("direction")
        if direction == "forward":
            measure.repeat_start = True
        elif direction == "backward":
            measure.repeat_end = True
            times = repeat.get("times")
            if times is not None:
                measure.repeat_times = int(times) + 1
        else:
            raise FormatError(f"repeat direction {direction!r} unreadable")
    ending = element.find("ending")
    if ending is not None and ending.get("type") in ("start", None):
        numbers = ending.get("number", "")
        try:
            parsed = tuple(int(n) for n in numbers.replace(" ", "").split(",") if n)
        except ValueError:
            raise FormatError(f"ending number {numbers!r} unreadable")
        measure.ending_numbers = measure.ending_numbers + parsed


def _check_direction(element: ET.Element) -> None:
    """Directions are cosmetic except da capo / dal segno navigation."""
    for sound in element.iter("sound"):
        for attr in ("dacapo", "dalsegno", "tocoda", "fine", "segno", "coda"):
            if sound.get(attr) is not None:
                raise UnsupportedFeatureError("sound", f"{attr} navigation")
    for tag in ("segno", "coda"):
        if element.find(f"direction-type/{tag}") is not None:
            raise UnsupportedFeatureError(tag, "navigation marker")


def _find_text(element: ET.Element, path: str) -> str | None:
    found = element.find(path)
    if found is None or found.text is None:
        return None
    return found.text.strip()


# ---------------------------------------------------------------------------
# Export


def export_musicxml(sheet: LeadSheet) -> bytes:
    """Serialize a lead sheet as a score-partwise MusicXML document.

    Each segment between barlines becomes one measure whose time signature
    is derived from the segment's duration sum (smallest denominator from
    /4, /8, ... that gives an integer beat count, so irregular bars export
    cleanly).  Harmony elements are emitted only when the chord changes.
    """
    if not sheet.events:
        raise EmptyInputError("cannot export an empty lead sheet")
    sheet.validate()

    divisions = 1
    for event in sheet.events:
        if isinstance(event, (Note, Rest)):
            divisions = math.lcm(divisions, event.rhythm.duration.denominator)

    root = ET.Element("score-partwise", version="3.1")
    work = ET.SubElement(root, "work")
    ET.SubElement(work, "work-title").text = sheet.title or "Untitled"
    part_list = ET.SubElement(root, "part-list")
    score_part = ET.SubElement(part_list, "score-part", id="P1")
    ET.SubElement(score_part, "part-name").text = "Lead"
    part = ET.SubElement(root, "part", id="P1")

    current_chord = None
    for number, bar in enumerate(sheet.bars(), start=1):
        measure = ET.SubElement(part, "measure", number=str(number))
        attributes = ET.SubElement(measure, "attributes")
        if number == 1:
            ET.SubElement(attributes, "divisions").text = str(divisions)
        duration_sum = sum((e.rhythm.duration for e in bar), Fraction(0))
        beats, beat_type = _time_signature_for(duration_sum)
        time = ET.SubElement(attributes, "time")
        ET.SubElement(time, "beats").text = str(beats)
        ET.SubElement(time, "beat-type").text = str(beat_type)

        for event in bar:
            if event.chord != current_chord:
                current_chord = event.chord
                _append_harmony(measure, current_chord)
            _append_note(measure, event, divisions)

    payload = ET.tostring(root, encoding="UTF-8", xml_declaration=True)
    doctype = (
        b'<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 '
        b'Partwise//EN" "http://www.musicxml.org/dtds/partwise.dtd">\n'
    )
    head, _, body = payload.partition(b"\n")
    return head + b"\n" + doctype + body + b"\n"


def export_musicxml_file(sheet: LeadSheet, path) -> None:
    with open(path, "wb") as handle:
        handle.write(export_musicxml(sheet))


def _time_signature_for(duration: Fraction) -> tuple[int, int]:
    """Smallest-denominator signature whose length equals ``duration``."""
    if duration <= 0:
        raise EmptyInputError("measure with zero duration")
    for beat_type in (4, 8, 16, 32, 64):
        beats = duration * beat_type / 4
        if beats.denominator == 1:
            return int(beats), beat_type
    # Tuplet remainders: fall back to an exact non-binary denominator.
    return duration.numerator, 4 * duration.denominator


def _append_harmony(measure: ET.Element, chord) -> None:
    harmony = ET.SubElement(measure, "harmony")
    root = ET.SubElement(harmony, "root")
    step, alter = _PC_TO_STEP_ALTER[chord.root]
    ET.SubElement(root, "root-step").text = step
    if alter:
        ET.SubElement(root, "root-alter").text = str(alter)
    ET.SubElement(harmony, "kind").text = _MODE_TO_KIND[chord.mode]


def _append_note(measure: ET.Element, event, divisions: int) -> None:
    note = ET.SubElement(measure, "note")
    if isinstance(event, Rest):
        ET.SubElement(note, "rest")
    else:
        pitch = ET.SubElement(note, "pitch")
        step, alter = _PC_TO_STEP_ALTER[event.pitch % 12]
        ET.SubElement(pitch, "step").text = step
        if alter:
            ET.SubElement(pitch, "alter").text = str(alter)
        ET.SubElement(pitch, "octave").text = str(event.pitch // 12 - 1)
    ticks = event.rhythm.duration * divisions
    ET.SubElement(note, "duration").text = str(int(ticks))
    type_name, dots, tuplet = _RHYTHM_NOTATION[event.rhythm]
    ET.SubElement(note, "type").text = type_name
    for _ in range(dots):
        ET.SubElement(note, "dot")
    if tuplet is not None:
        modification = ET.SubElement(note, "time-modification")
        ET.SubElement(modification, "actual-notes").text = str(tuplet[0])
        ET.SubElement(modification, "normal-notes").text = str(tuplet[1])
