"""leadsheetgen: two-stage recurrent lead sheet generation.

A lead sheet is modeled as one synchronized sequence of chords, rhythms,
and melody pitches with explicit barline tokens.  Generation happens in
two stages: a template model samples the chord and rhythm streams, then a
melody model, which reads the whole template through bidirectional
recurrent layers, samples the melody on top.  The package also ships the
MusicXML ingestion pipeline, MIDI/MusicXML export, from-scratch trainable
recurrent networks, two ablation baselines, and rater-score evaluation.
"""

from .encoding import (
    EncodedSequence,
    decode,
    encode,
    load_corpus,
    map_mode,
    save_corpus,
    transpose,
)
from .errors import LeadSheetError
from .evaluate import RatingTable, aggregate, corpus_stats, z_score
from .generate import (
    GenerationResult,
    SampleConfig,
    TemplateSample,
    condition_on_existing,
    generate_lead_sheet,
    sample_melody,
    sample_template,
)
from .midi import export_midi, export_midi_file
from .models import (
    NoBiLSTMBaseline,
    OneStageBaseline,
    StageOneModel,
    StageTwoModel,
    build_model,
    load_model,
)
from .musicxml import (
    export_musicxml,
    export_musicxml_file,
    parse_musicxml,
    parse_musicxml_file,
)
from .preprocess import (
    delete_anacrusis,
    eliminate_polyphony,
    ignore_ties,
    preprocess_corpus,
    preprocess_score,
    remove_ornaments,
    to_lead_sheet,
    unfold_repetitions,
)
from .score import RawEvent, RawHarmony, RawMeasure, RawScore
from .sheet import BARLINE, Barline, LeadSheet, Note, Rest
from .train import TrainConfig, augment_batch, make_batches, train
from .vocab import ChordMode, ChordSymbol, RhythmType

__version__ = "0.1.0"

__all__ = [
    "BARLINE",
    "Barline",
    "ChordMode",
    "ChordSymbol",
    "EncodedSequence",
    "GenerationResult",
    "LeadSheet",
    "LeadSheetError",
    "NoBiLSTMBaseline",
    "Note",
    "OneStageBaseline",
    "RatingTable",
    "RawEvent",
    "RawHarmony",
    "RawMeasure",
    "RawScore",
    "Rest",
    "RhythmType",
    "SampleConfig",
    "StageOneModel",
    "StageTwoModel",
    "TemplateSample",
    "TrainConfig",
    "aggregate",
    "augment_batch",
    "build_model",
    "condition_on_existing",
    "corpus_stats",
    "decode",
    "delete_anacrusis",
    "eliminate_polyphony",
    "encode",
    "export_midi",
    "export_midi_file",
    "export_musicxml",
    "export_musicxml_file",
    "generate_lead_sheet",
    "ignore_ties",
    "load_corpus",
    "load_model",
    "make_batches",
    "map_mode",
    "parse_musicxml",
    "parse_musicxml_file",
    "preprocess_corpus",
    "preprocess_score",
    "remove_ornaments",
    "sample_melody",
    "sample_template",
    "save_corpus",
    "to_lead_sheet",
    "train",
    "transpose",
    "unfold_repetitions",
    "z_score",
]
