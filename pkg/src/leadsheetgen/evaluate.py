"""Rater-score standardization and corpus statistics.

Listening-test ratings (1..5) are standardized per user by mean and range:

    Z[c, u] = (R[c, u] - mean_u) / (max_c' R[c', u] - min_c' R[c', u])

Users who rated every clip identically have an undefined Z and are
excluded (callers should surface a warning).  Group-level reports average
Z over all (user, clip) pairs per group.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, FormatError
from .vocab import (
    CHORD_BARLINE,
    MELODY_BARLINE,
    MELODY_REST,
    RHYTHM_BARLINE,
    ChordMode,
    RhythmType,
)

QUESTIONS = ("pleasing", "coherence", "turing")


@dataclass
class RatingTable:
    """Integer ratings keyed by (user, clip) for one survey question."""

    ratings: dict = field(default_factory=dict)
    question: str = "pleasing"

    def validate(self) -> "RatingTable":
        for (user, clip), value in self.ratings.items():
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise FormatError(f"rating {value!r} for ({user}, {clip}) outside 1..5")
        return self

    def users(self) -> list:
        return sorted({user for user, _ in self.ratings})

    def by_user(self) -> dict:
        out: dict = {}
        for (user, clip), value in self.ratings.items():
            out.setdefault(user, {})[clip] = value
        return out


def constant_raters(table: RatingTable) -> list:
    """Users whose ratings never vary (Z undefined, excluded)."""
    return [
        user
        for user, clips in sorted(table.by_user().items())
        if len(set(clips.values())) < 2
    ]


def z_score(table: RatingTable) -> dict:
    """Standardized score per (user, clip); constant raters are dropped."""
    table.validate()
    scores: dict = {}
    for user, clips in table.by_user().items():
        values = list(clips.values())
        spread = max(values) - min(values)
        if spread == 0:
            continue
        mean = sum(values) / len(values)
        for clip, value in clips.items():
            scores[(user, clip)] = (value - mean) / spread
    return scores


def aggregate(scores: dict, clip_groups: dict) -> dict:
    """Mean and standard deviation of Z per group label.

    ``clip_groups`` maps clip ids to group labels.  Returns, per label (in
    first-seen order of ``clip_groups``), a (mean, std, count) tuple over
    every scored (user, clip) pair whose clip belongs to the group.
    """
    labels = list(dict.fromkeys(clip_groups.values()))
    grouped: dict = {label: [] for label in labels}
    for (user, clip), value in scores.items():
        label = clip_groups.get(clip)
        if label is not None:
            grouped[label].append(value)
    out = {}
    for label in labels:
        values = grouped[label]
        if not values:
            raise EmptyInputError(f"group {label!r} has no rated clips")
        array = np.asarray(values, dtype=np.float64)
        out[label] = (float(array.mean()), float(array.std()), len(values))
    return out


# ---------------------------------------------------------------------------
# Corpus statistics


@dataclass
class CorpusStats:
    rhythm_histogram: Counter = field(default_factory=Counter)
    mode_histogram: Counter = field(default_factory=Counter)
    pitch_range: tuple | None = None
    sheet_lengths: list = field(default_factory=list)
    bar_counts: list = field(default_factory=list)

    def total_events(self) -> int:
        return sum(self.sheet_lengths)

    def format_report(self) -> str:
        lines = [f"sheets={len(self.sheet_lengths)}", f"events={self.total_events()}"]
        if self.pitch_range:
            lines.append(f"pitch_range={self.pitch_range[0]}..{self.pitch_range[1]}")
        lines.append(f"bars={sum(self.bar_counts)}")
        for name, count in sorted(self.rhythm_histogram.items()):
            lines.append(f"rhythm.{name}={count}")
        for name, count in sorted(self.mode_histogram.items()):
            lines.append(f"mode.{name}={count}")
        return "\n".join(lines) + "\n"


def corpus_stats(corpus) -> CorpusStats:
    """Histograms over an encoded corpus, for preprocessing sanity checks.

    Barlines are counted under their own key in both histograms, so every
    histogram total equals the corpus event count.
    """
    stats = CorpusStats()
    lowest, highest = None, None
    for seq in corpus:
        stats.sheet_lengths.append(len(seq))
        stats.bar_counts.append(int((seq.melodies == MELODY_BARLINE).sum()))
        for index in seq.rhythms:
            if index == RHYTHM_BARLINE:
                stats.rhythm_histogram["barline"] += 1
            else:
                stats.rhythm_histogram[RhythmType.from_index(int(index)).name.lower()] += 1
        for index in seq.chords:
            if index == CHORD_BARLINE:
                stats.mode_histogram["barline"] += 1
            else:
                stats.mode_histogram[ChordMode(int(index) % 4).name.lower()] += 1
        pitched = seq.melodies[(seq.melodies >= 0) & (seq.melodies < MELODY_REST)]
        if len(pitched):
            low, high = int(pitched.min()), int(pitched.max())
            lowest = low if lowest is None else min(lowest, low)
            highest = high if highest is None else max(highest, high)
    if lowest is not None:
        stats.pitch_range = (lowest, highest)
    return stats


# ---------------------------------------------------------------------------
# Delimited text I/O


def read_ratings(path) -> dict:
    """Read ``user,clip,question,rating`` rows into per-question tables.

    A header row is optional.  Malformed rows raise with their row number.
    """
    tables: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row_number, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if row_number == 1 and cells[:1] == ["user"]:
                continue
            if len(cells) != 4:
                raise FormatError(f"row {row_number}: expected 4 columns, got {len(cells)}")
            user, clip, question, rating_text = cells
            try:
                rating = int(rating_text)
            except ValueError:
                raise FormatError(f"row {row_number}: rating {rating_text!r} is not an integer")
            if not 1 <= rating <= 5:
                raise FormatError(f"row {row_number}: rating {rating} outside 1..5")
            table = tables.setdefault(question, RatingTable(question=question))
            table.ratings[(user, clip)] = rating
    if not tables:
        raise EmptyInputError("ratings file contains no rows")
    return tables


def read_groups(path) -> dict:
    """Read ``clip,label`` rows mapping clips to model groups."""
    groups: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row_number, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if row_number == 1 and cells[:1] == ["clip"]:
                continue
            if len(cells) != 2:
                raise FormatError(f"row {row_number}: expected 2 columns, got {len(cells)}")
            groups[cells[0]] = cells[1]
    if not groups:
        raise EmptyInputError("groups file contains no rows")
    return groups


def write_group_report(path, per_question: dict) -> None:
    """Tab-separated report: one row per group, mean/std per question."""
    questions = [q for q in QUESTIONS if q in per_question] + [
        q for q in per_question if q not in QUESTIONS
    ]
    labels: list = []
    for question in questions:
        for label in per_question[question]:
            if label not in labels:
                labels.append(label)
    with open(path, "w", encoding="utf-8") as handle:
        header = ["model"]
        for question in questions:
            header += [f"{question}_mean", f"{question}_std", f"{question}_n"]
        handle.write("\t".join(header) + "\n")
        for label in labels:
            row = [label]
            for question in questions:
                stats = per_question[question].get(label)
                if stats is None:
                    row += ["", "", ""]
                else:
                    mean, std, count = stats
                    row += [f"{mean:.4f}", f"{std:.4f}", str(count)]
            handle.write("\t".join(row) + "\n")
