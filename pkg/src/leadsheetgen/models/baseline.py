"""Single-stage baseline: chords, rhythms, and melody predicted jointly.

All three streams are concatenated into one 192-wide input, run through
three stacked LSTMs, and a single dense head emits 192 logits cut into
chord/rhythm/melody heads.  The melody here never sees future harmony.
"""

from __future__ import annotations

import numpy as np

from ..nn.layers import Dense, LSTMLayer
from ..nn.ops import masked_cross_entropy, one_hot_steps, softmax_t
from ..vocab import CHORD_DIM, FULL_DIM, MELODY_DIM, RHYTHM_DIM
from .base import SequenceModel


class OneStageBaseline(SequenceModel):
    ARCH_TAG = 3

    def __init__(self, hidden: int = 512, rng=None, dtype=np.float32):
        super().__init__()
        self.hidden = hidden
        self._register(
            lstm1=LSTMLayer(FULL_DIM, hidden, rng, dtype),
            lstm2=LSTMLayer(hidden, hidden, rng, dtype),
            lstm3=LSTMLayer(hidden, hidden, rng, dtype),
            head=Dense(hidden, FULL_DIM, rng, dtype),
        )

    def forward(self, xs):
        h1, cache1 = self.lstm1.forward(xs)
        h2, cache2 = self.lstm2.forward(h1)
        h3, cache3 = self.lstm3.forward(h2)
        logits, cache_head = self.head.forward(h3)
        return logits, (cache1, cache2, cache3, cache_head)

    def forward_dists(self, xs, tau_chord=1.0, tau_rhythm=1.0, tau_melody=1.0):
        logits, _ = self.forward(xs)
        split1 = CHORD_DIM
        split2 = CHORD_DIM + RHYTHM_DIM
        return (
            softmax_t(logits[..., :split1], tau_chord),
            softmax_t(logits[..., split1:split2], tau_rhythm),
            softmax_t(logits[..., split2:], tau_melody),
        )

    def loss_and_grads(self, batch):
        dtype = self.dtype
        xs = np.concatenate(
            [
                one_hot_steps(batch["in_chords"], CHORD_DIM, dtype),
                one_hot_steps(batch["in_rhythms"], RHYTHM_DIM, dtype),
                one_hot_steps(batch["in_melodies"], MELODY_DIM, dtype),
            ],
            axis=-1,
        )
        mask = batch["mask"]
        logits, cache = self.forward(xs)
        split1 = CHORD_DIM
        split2 = CHORD_DIM + RHYTHM_DIM
        chord_ce, dchord = masked_cross_entropy(
            logits[..., :split1], batch["tgt_chords"], mask
        )
        rhythm_ce, drhythm = masked_cross_entropy(
            logits[..., split1:split2], batch["tgt_rhythms"], mask
        )
        melody_ce, dmelody = masked_cross_entropy(
            logits[..., split2:], batch["tgt_melodies"], mask
        )
        loss = (chord_ce + rhythm_ce + melody_ce) / 3.0
        third = 1.0 / 3.0
        dlogits = np.concatenate(
            [third * dchord, third * drhythm, third * dmelody], axis=-1
        ).astype(dtype)

        cache1, cache2, cache3, cache_head = cache
        dh3, head_grads = self.head.backward(dlogits, cache_head)
        dh2, lstm3_grads = self.lstm3.backward(dh3, cache3)
        dh1, lstm2_grads = self.lstm2.backward(dh2, cache2)
        _, lstm1_grads = self.lstm1.backward(dh1, cache1)

        grads = {f"lstm1.{k}": v for k, v in lstm1_grads.items()}
        grads.update({f"lstm2.{k}": v for k, v in lstm2_grads.items()})
        grads.update({f"lstm3.{k}": v for k, v in lstm3_grads.items()})
        grads.update({f"head.{k}": v for k, v in head_grads.items()})
        metrics = {
            "loss": loss,
            "chord_ce": chord_ce,
            "rhythm_ce": rhythm_ce,
            "melody_ce": melody_ce,
        }
        return metrics, grads
