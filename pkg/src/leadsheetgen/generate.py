"""Inference: sample templates and melodies, assemble valid lead sheets.

The sampler enforces structural consistency that the trained models only
follow statistically:

* chord and rhythm barlines always coincide (the chord symbol is sampled
  first; a chord barline forces the rhythm barline, otherwise the rhythm
  barline entry is masked out and the rest renormalized);
* no two consecutive barlines and no leading barline, so every sampled
  template decodes into a structurally valid sheet;
* the melody token is forced to the barline exactly at template barline
  positions and masked away everywhere else.

Temperatures sharpen or flatten each head independently; a fixed seed
fixes the output exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import EncodedSequence, decode, encode, one_hot
from .errors import DecodeError, IncompatibleCheckpointError
from .sheet import LeadSheet
from .vocab import (
    CHORD_BARLINE,
    CHORD_DIM,
    MELODY_BARLINE,
    MELODY_DIM,
    RHYTHM_BARLINE,
    RHYTHM_DIM,
)


@dataclass
class SampleConfig:
    """Sampling knobs.

    Melody temperature defaults a bit under 1 (0.75..1.0 is the musically
    useful band); chord and rhythm default to 1.0.  ``max_steps`` caps the
    sequence length in case the template model refuses to close bars.
    """

    tau_melody: float = 0.9
    tau_chord: float = 1.0
    tau_rhythm: float = 1.0
    target_bars: int = 8
    max_steps: int = 1000
    seed: int = 0
    greedy: bool = False

    def validate(self) -> "SampleConfig":
        for name in ("tau_melody", "tau_chord", "tau_rhythm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.target_bars < 1:
            raise ValueError("target_bars must be at least 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        return self


@dataclass
class TemplateSample:
    chords: np.ndarray
    rhythms: np.ndarray
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.chords)


@dataclass
class GenerationResult:
    sheet: LeadSheet
    truncated: bool


def sample_index(logits, tau, rng, forbid=(), greedy=False) -> int:
    """Sample one index from temperature-scaled logits.

    ``forbid`` marks indices to exclude; the remaining mass is
    renormalized.  Greedy mode returns the (unmasked-maximum) argmax,
    which is the tau -> 0 limit.
    """
    scores = np.asarray(logits, dtype=np.float64).copy()
    for index in forbid:
        scores[index] = -np.inf
    if greedy:
        return int(scores.argmax())
    scores = scores / tau
    scores -= scores.max()
    p = np.exp(scores)
    p /= p.sum()
    return int(rng.choice(len(p), p=p))


def _template_step_onehot(chord_idx: int, rhythm_idx: int, dtype) -> np.ndarray:
    x = np.zeros((1, CHORD_DIM + RHYTHM_DIM), dtype=dtype)
    x[0, chord_idx] = 1
    x[0, CHORD_DIM + rhythm_idx] = 1
    return x


def sample_template(model, config: SampleConfig, rng=None, primer=None) -> TemplateSample:
    """Autoregressively sample a chord+rhythm template.

    Generation starts from a neutral barline input (or replays ``primer``
    steps first; primer bars count toward ``target_bars``) and stops after
    ``target_bars`` barlines.  If ``max_steps`` is hit first, the bar is
    closed artificially and the result flagged truncated.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    dtype = model.dtype

    chords: list[int] = []
    rhythms: list[int] = []
    bars = 0
    state = model.init_state(1)
    chord_logits, rhythm_logits, state = model.step(
        _template_step_onehot(CHORD_BARLINE, RHYTHM_BARLINE, dtype), state
    )
    if primer is not None:
        primer_chords, primer_rhythms = _as_template_arrays(primer)
        for chord_idx, rhythm_idx in zip(primer_chords, primer_rhythms):
            chords.append(int(chord_idx))
            rhythms.append(int(rhythm_idx))
            bars += int(chord_idx) == CHORD_BARLINE
            chord_logits, rhythm_logits, state = model.step(
                _template_step_onehot(int(chord_idx), int(rhythm_idx), dtype), state
            )

    truncated = False
    while bars < config.target_bars:
        if len(chords) >= config.max_steps:
            truncated = True
            break
        # A barline may not open the sheet or follow another barline.
        after_barline = not chords or chords[-1] == CHORD_BARLINE
        forbid_chord = (CHORD_BARLINE,) if after_barline else ()
        chord_idx = sample_index(
            chord_logits[0], config.tau_chord, rng, forbid=forbid_chord, greedy=config.greedy
        )
        if chord_idx == CHORD_BARLINE:
            rhythm_idx = RHYTHM_BARLINE
        else:
            rhythm_idx = sample_index(
                rhythm_logits[0],
                config.tau_rhythm,
                rng,
                forbid=(RHYTHM_BARLINE,),
                greedy=config.greedy,
            )
        chords.append(chord_idx)
        rhythms.append(rhythm_idx)
        bars += chord_idx == CHORD_BARLINE
        if bars >= config.target_bars:
            break
        chord_logits, rhythm_logits, state = model.step(
            _template_step_onehot(chord_idx, rhythm_idx, dtype), state
        )
    if truncated and (not chords or chords[-1] != CHORD_BARLINE):
        chords.append(CHORD_BARLINE)
        rhythms.append(RHYTHM_BARLINE)
    return TemplateSample(
        chords=np.array(chords, dtype=np.int16),
        rhythms=np.array(rhythms, dtype=np.int16),
        truncated=truncated,
    )


def _as_template_arrays(template) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(template, TemplateSample):
        chords, rhythms = template.chords, template.rhythms
    elif isinstance(template, EncodedSequence):
        chords, rhythms = template.chords, template.rhythms
    else:
        chords, rhythms = template
    chords = np.asarray(chords, dtype=np.int16)
    rhythms = np.asarray(rhythms, dtype=np.int16)
    if chords.shape != rhythms.shape:
        raise DecodeError("template chord and rhythm streams differ in length")
    if not np.array_equal(chords == CHORD_BARLINE, rhythms == RHYTHM_BARLINE):
        raise DecodeError("template barlines are desynchronized")
    return chords, rhythms


def sample_melody(
    model, template, config: SampleConfig, rng=None, title: str = "", source_id: str = ""
) -> LeadSheet:
    """Sample a melody over a fixed template and decode the lead sheet.

    The template encoder consumes the whole sequence once (giving the
    bidirectional model its look-ahead); the melody is then sampled step
    by step.  At template barline positions the melody token is forced to
    the barline, elsewhere the barline token is masked out.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    chords, rhythms = _as_template_arrays(template)
    if len(chords) == 0:
        raise DecodeError("empty template")
    dtype = model.dtype

    xs = np.concatenate(
        [one_hot(chords, CHORD_DIM, dtype), one_hot(rhythms, RHYTHM_DIM, dtype)], axis=-1
    )[:, None, :]
    context = model.context_states(xs)

    melody = np.empty(len(chords), dtype=np.int16)
    state = model.init_melody_state(1)
    previous = MELODY_BARLINE  # neutral start symbol
    for t in range(len(chords)):
        prev_onehot = np.zeros((1, MELODY_DIM), dtype=dtype)
        prev_onehot[0, previous] = 1
        logits, state = model.melody_step(context[t], prev_onehot, state)
        if chords[t] == CHORD_BARLINE:
            token = MELODY_BARLINE
        else:
            token = sample_index(
                logits[0],
                config.tau_melody,
                rng,
                forbid=(MELODY_BARLINE,),
                greedy=config.greedy,
            )
        melody[t] = token
        previous = token

    seq = EncodedSequence(chords=chords, rhythms=rhythms, melodies=melody)
    return decode(seq, title=title, source_id=source_id)


def generate_lead_sheet(
    stage_one, stage_two, config: SampleConfig, rng=None, primer=None, title: str = ""
) -> GenerationResult:
    """Sample a template, then a melody on top of it."""
    if stage_one.layout_hash != stage_two.layout_hash:
        raise IncompatibleCheckpointError(
            "stage one and stage two checkpoints use different vocabulary layouts"
        )
    if rng is None:
        rng = np.random.default_rng(config.seed)
    template = sample_template(stage_one, config, rng=rng, primer=primer)
    sheet = sample_melody(
        stage_two, template, config, rng=rng, title=title or "Generated lead sheet"
    )
    return GenerationResult(sheet=sheet, truncated=template.truncated)


def condition_on_existing(
    stage_two, source_sheet: LeadSheet, config: SampleConfig, rng=None
) -> LeadSheet:
    """Keep a song's chord+rhythm+barline streams, sample a new melody."""
    seq = encode(source_sheet)
    template = TemplateSample(chords=seq.chords, rhythms=seq.rhythms)
    title = (source_sheet.title or "Untitled") + " (new melody)"
    return sample_melody(
        stage_two, template, config, rng=rng, title=title, source_id=source_sheet.source_id
    )


def write_metadata(path, entries: dict) -> None:
    """Sidecar key=value lines describing one generation run."""
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in entries.items():
            handle.write(f"{key}={value}\n")
