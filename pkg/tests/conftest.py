from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from leadsheetgen.encoding import encode
from leadsheetgen.models import load_model
from leadsheetgen.sheet import BARLINE, LeadSheet, Note, Rest
from leadsheetgen.train import TrainConfig, train
from leadsheetgen.vocab import ChordMode, ChordSymbol, RhythmType

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def fig1_events():
    """The two-bar reference decomposition used across the suite."""
    c_major = ChordSymbol(0, ChordMode.MAJOR)
    g_major = ChordSymbol(7, ChordMode.MAJOR)
    quarter, eighth, half = RhythmType.QUARTER, RhythmType.EIGHTH, RhythmType.HALF
    return [
        Note(67, quarter, c_major),
        Note(64, eighth, c_major),
        Note(67, eighth, c_major),
        Note(72, half, c_major),
        BARLINE,
        Note(74, quarter, g_major),
        Note(71, quarter, g_major),
        Note(67, half, g_major),
        BARLINE,
    ]


@pytest.fixture
def fig1_sheet() -> LeadSheet:
    return LeadSheet(events=fig1_events(), title="Figure One").validate()


def build_toy_sheets() -> list[LeadSheet]:
    """Five short songs, each one bar pattern repeated four times.

    Pitch ranges, chords, and rhythm pairs are disjoint across songs so a
    small model can memorize all five without interference.
    """
    quarter = RhythmType.QUARTER
    eighth = RhythmType.EIGHTH
    half = RhythmType.HALF
    dotted_quarter = RhythmType.DOTTED_QUARTER
    whole = RhythmType.WHOLE
    c = [
        ChordSymbol(0, ChordMode.MAJOR),
        ChordSymbol(2, ChordMode.MINOR),
        ChordSymbol(4, ChordMode.MAJOR),
        ChordSymbol(9, ChordMode.MINOR),
        ChordSymbol(7, ChordMode.MAJOR),
        ChordSymbol(9, ChordMode.AUGMENTED),
    ]
    bar_patterns = [
        [Note(60, quarter, c[0]), Note(62, quarter, c[0]), Note(64, quarter, c[0]), Note(65, quarter, c[0])],
        [Note(70, eighth, c[1]), Note(72, eighth, c[1]), Note(74, eighth, c[1]), Note(76, eighth, c[1]), Note(78, half, c[1])],
        [Note(80, dotted_quarter, c[2]), Note(82, eighth, c[2]), Note(84, dotted_quarter, c[3]), Note(86, eighth, c[3])],
        [Note(90, whole, c[4])],
        [Note(50, half, c[5]), Rest(half, c[5])],
    ]
    sheets = []
    for k, pattern in enumerate(bar_patterns):
        events = []
        for _ in range(8):
            events.extend(pattern)
            events.append(BARLINE)
        sheets.append(LeadSheet(events=events, title=f"toy-{k}").validate())
    return sheets


@pytest.fixture(scope="session")
def toy_sheets() -> list[LeadSheet]:
    return build_toy_sheets()


@pytest.fixture(scope="session")
def toy_corpus(toy_sheets):
    return [encode(sheet) for sheet in toy_sheets]


def toy_train_config(max_steps: int) -> TrainConfig:
    return TrainConfig(
        batch_size=16,
        sequence_length=48,
        learning_rate=1e-3,
        alpha=0.5,
        max_steps=max_steps,
        checkpoint_interval=1000,
        seed=11,
        clip_norm=5.0,
        augment=False,
        hidden_size=64,
        deterministic=True,
        validation_fraction=0.0,
    )


@pytest.fixture(scope="session")
def trained_toy(toy_corpus, tmp_path_factory):
    """Stage-one and stage-two models overfit on the toy corpus.

    Trained once per session; the overfit acceptance criterion asserts on
    the recorded final metrics, later criteria reuse the checkpoints.
    """
    root = tmp_path_factory.mktemp("toy_models")
    results = {}
    for variant in ("stage1", "stage2"):
        out_dir = root / variant
        result = train(variant, toy_corpus, toy_train_config(2000), out_dir)
        results[variant] = {
            "result": result,
            "checkpoint": result.final_checkpoint,
            "model": load_model(result.final_checkpoint),
        }
    return results


@pytest.fixture(scope="session")
def rng_factory():
    def make(seed=0):
        return np.random.default_rng(seed)

    return make
