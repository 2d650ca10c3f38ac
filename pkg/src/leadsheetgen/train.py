"""Corpus batching, transposition augmentation, and the optimization loop.

Training consumes windows of ``sequence_length + 1`` consecutive steps.
Sheets are drawn with probability proportional to their length, then a
window offset uniformly; sheets shorter than a full window are padded at
the end with a -1 marker whose loss contribution is masked to zero.

Batches carry explicit teacher-forcing input and target arrays.  A window
at the very start of a sheet contributes the sequence-start pair (barline
token as input, first event as target), so models learn the same context
generation begins from; windows cut mid-sheet carry a masked pad in that
first slot instead.  Everything is driven by one seeded generator, so a
(seed, config, corpus) triple reproduces checkpoints and metrics exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .encoding import valid_shifts
from .errors import ConfigError, EmptyInputError, NumericFaultError
from .models import StageOneModel, build_model
from .nn.adam import Adam
from .nn.ops import require_finite
from .vocab import CHORD_BARLINE, MELODY_BARLINE, RHYTHM_BARLINE

PAD = -1


@dataclass
class TrainConfig:
    batch_size: int = 128
    sequence_length: int = 100
    learning_rate: float = 0.001
    alpha: float = 0.5
    max_steps: int = 0
    checkpoint_interval: int = 0  # 0 = only the initial and final checkpoints
    seed: int = 0
    clip_norm: float = 5.0
    augment: bool = True
    hidden_size: int = 512
    deterministic: bool = True
    validation_fraction: float = 0.05

    def validate(self) -> "TrainConfig":
        if self.batch_size < 1:
            raise ConfigError("batch_size", "must be at least 1")
        if self.sequence_length < 2:
            raise ConfigError("sequence_length", "must be at least 2")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate", "must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha", "must lie in [0, 1]")
        if self.max_steps < 0:
            raise ConfigError("max_steps", "must be nonnegative")
        if self.hidden_size < 1:
            raise ConfigError("hidden_size", "must be at least 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError("validation_fraction", "must lie in [0, 1)")
        return self


def make_batches(corpus, config: TrainConfig, rng):
    """Yield training batches forever; deterministic given the generator.

    Each batch is a dict of time-major (L+1, B) index arrays: ``in_*`` are
    the teacher-forcing inputs, ``tgt_*`` the next-step targets, and
    ``mask`` flags the valid pair slots.  Slot 0 holds the sequence-start
    pair (barline input, first window step as target) when the window
    begins at the sheet start, and a masked pad otherwise; unused slots of
    short sheets are padded with -1 and masked.
    """
    sheets = [seq for seq in corpus if len(seq) >= 2]
    if not sheets:
        raise EmptyInputError("corpus has no sheets with at least 2 events")
    lengths = np.array([len(seq) for seq in sheets], dtype=np.float64)
    probabilities = lengths / lengths.sum()
    L = config.sequence_length
    B = config.batch_size
    start = (CHORD_BARLINE, RHYTHM_BARLINE, MELODY_BARLINE)
    while True:
        batch = {
            f"{kind}_{stream}": np.full((L + 1, B), PAD, dtype=np.int16)
            for kind in ("in", "tgt")
            for stream in ("chords", "rhythms", "melodies")
        }
        mask = np.zeros((L + 1, B), dtype=np.float32)
        for b in range(B):
            seq = sheets[int(rng.choice(len(sheets), p=probabilities))]
            n = len(seq)
            streams = (seq.chords, seq.rhythms, seq.melodies)
            if n >= L + 1:
                offset = int(rng.integers(0, n - L))
            else:
                offset = 0
            if offset == 0:
                # Sequence-start window: slot 0 pairs the neutral barline
                # start token with the sheet's first event.
                take = min(n, L + 1)
                for name, stream, bar in zip(("chords", "rhythms", "melodies"), streams, start):
                    batch[f"in_{name}"][0, b] = bar
                    batch[f"in_{name}"][1:take, b] = stream[: take - 1]
                    batch[f"tgt_{name}"][:take, b] = stream[:take]
                mask[:take, b] = 1.0
            else:
                for name, stream in zip(("chords", "rhythms", "melodies"), streams):
                    batch[f"in_{name}"][1:, b] = stream[offset : offset + L]
                    batch[f"tgt_{name}"][1:, b] = stream[offset + 1 : offset + L + 1]
                mask[1:, b] = 1.0
        batch["mask"] = mask
        yield batch


def augment_batch(batch, rng):
    """Transpose each window by an independent uniform semitone shift.

    The shift is drawn from the subset of [-12, 12] that keeps every pitch
    of that window inside MIDI range (shift 0 is always valid).  Melody
    pitches move chromatically, chord roots wrap modulo 12; rests,
    barlines, padding, and the rhythm streams are untouched.  Input and
    target views of a window shift together.
    """
    out = dict(batch)
    for key in ("in_chords", "tgt_chords", "in_melodies", "tgt_melodies"):
        out[key] = batch[key].copy()
    for b in range(out["in_chords"].shape[1]):
        window_pitches = np.concatenate(
            [out["in_melodies"][:, b], out["tgt_melodies"][:, b]]
        )
        shifts = valid_shifts(window_pitches)
        k = shifts[int(rng.integers(0, len(shifts)))]
        if k == 0:
            continue
        for key in ("in_melodies", "tgt_melodies"):
            melody = out[key][:, b]
            pitched = (melody >= 0) & (melody < 128)
            melody[pitched] += k
        for key in ("in_chords", "tgt_chords"):
            chord = out[key][:, b]
            symbol = (chord >= 0) & (chord < CHORD_BARLINE)
            chord[symbol] = ((chord[symbol] // 4 + k) % 12) * 4 + chord[symbol] % 4
    return out


@dataclass
class TrainResult:
    steps: int
    final_checkpoint: Path
    metrics_path: Path
    final_metrics: dict = field(default_factory=dict)


def _model_loss(model, batch, config):
    if isinstance(model, StageOneModel):
        return model.loss_and_grads(batch, alpha=config.alpha)
    return model.loss_and_grads(batch)


def _metrics_line(step: int, wall_ms: int, metrics: dict) -> str:
    parts = [f"step={step}", f"wall_ms={wall_ms}"]
    parts += [f"{key}={value:.6f}" for key, value in metrics.items()]
    return " ".join(parts)


def train(variant: str, corpus, config: TrainConfig, out_dir) -> TrainResult:
    """Train one model variant; writes checkpoints and a metrics log.

    An initial checkpoint is written at step 0, one every
    ``checkpoint_interval`` steps, and ``ckpt_final.lsgm`` at the end.  A
    numeric fault aborts the run with the last good checkpoint retained.
    A held-out slice of the corpus (``validation_fraction``) is used for
    reported validation loss only, never for stopping.
    """
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)

    order = rng.permutation(len(corpus))
    n_val = int(len(corpus) * config.validation_fraction)
    val_set = [corpus[i] for i in order[:n_val]]
    train_set = [corpus[i] for i in order[n_val:]]
    if not train_set:
        raise EmptyInputError("no sheets left to train on")

    model = build_model(variant, hidden=config.hidden_size, rng=rng, dtype=np.float32)
    optimizer = Adam(
        model.parameters(),
        learning_rate=config.learning_rate,
        clip_norm=config.clip_norm or None,
    )
    batches = make_batches(train_set, config, rng)
    val_rng = np.random.default_rng((config.seed, 1))
    val_batches = (
        list(_take(make_batches(val_set, config, val_rng), 2)) if val_set else []
    )

    def checkpoint_path(step: int) -> Path:
        return out_dir / f"ckpt_{step:06d}.lsgm"

    model.save(checkpoint_path(0))
    metrics_path = out_dir / "metrics.log"
    final_metrics: dict = {}
    started = time.monotonic()
    with open(metrics_path, "w", encoding="utf-8") as log:
        for step in range(1, config.max_steps + 1):
            batch = next(batches)
            if config.augment:
                batch = augment_batch(batch, rng)
            try:
                metrics, grads = _model_loss(model, batch, config)
                require_finite("loss", np.array(metrics["loss"]))
                require_finite("gradients", *grads.values())
            except NumericFaultError:
                log.flush()
                raise
            optimizer.step(grads)
            wall_ms = 0 if config.deterministic else int((time.monotonic() - started) * 1000)
            log.write(_metrics_line(step, wall_ms, metrics) + "\n")
            final_metrics = metrics
            if config.checkpoint_interval and step % config.checkpoint_interval == 0:
                model.save(checkpoint_path(step))
                if val_batches:
                    val_loss = _validation_loss(model, val_batches, config)
                    log.write(f"step={step} wall_ms={wall_ms} val_loss={val_loss:.6f}\n")
    final_path = out_dir / "ckpt_final.lsgm"
    model.save(final_path)
    return TrainResult(
        steps=config.max_steps,
        final_checkpoint=final_path,
        metrics_path=metrics_path,
        final_metrics=final_metrics,
    )


def _take(generator, count: int):
    for _ in range(count):
        yield next(generator)


def _validation_loss(model, val_batches, config) -> float:
    losses = [_model_loss(model, batch, config)[0]["loss"] for batch in val_batches]
    return float(np.mean(losses))


def load_config_file(path, config_cls=TrainConfig, required=("max_steps",)):
    """Parse a ``key=value`` config file with typed validation.

    Unknown keys and missing required keys are reported by name; booleans
    accept true/false (any case).
    """
    known = {f.name: f.type for f in fields(config_cls)}
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(line, f"line {line_number} is not key=value")
            key, _, text = line.partition("=")
            key = key.strip()
            text = text.strip()
            if key not in known:
                raise ConfigError(key, "unknown key")
            values[key] = _convert(key, text, known[key])
    for key in required:
        if key not in values:
            raise ConfigError(key, "required key missing from config file")
    return config_cls(**values)


def _convert(key, text, type_name):
    kind = type_name if isinstance(type_name, str) else getattr(type_name, "__name__", "str")
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            lowered = text.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        return text
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as {kind}")
