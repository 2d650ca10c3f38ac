"""Chord+rhythm template model (generation stage one).

Two stacked LSTMs read the concatenated chord and rhythm one-hots of each
step and a single dense head emits 62 logits, cut into a 49-way chord head
and a 13-way rhythm head.  The loss mixes the two cross-entropies with a
weight ``alpha`` on the chord side.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..nn.layers import Dense, LSTMLayer
from ..nn.ops import masked_cross_entropy, softmax_t
from ..vocab import CHORD_DIM, TEMPLATE_DIM
from .base import SequenceModel, template_onehots


class StageOneModel(SequenceModel):
    ARCH_TAG = 1

    def __init__(self, hidden: int = 512, rng=None, dtype=np.float32):
        super().__init__()
        self.hidden = hidden
        self._register(
            lstm1=LSTMLayer(TEMPLATE_DIM, hidden, rng, dtype),
            lstm2=LSTMLayer(hidden, hidden, rng, dtype),
            head=Dense(hidden, TEMPLATE_DIM, rng, dtype),
        )

    def forward(self, xs):
        """(T, B, 62) inputs -> (T, B, 62) next-step logits plus cache."""
        h1, cache1 = self.lstm1.forward(xs)
        h2, cache2 = self.lstm2.forward(h1)
        logits, cache_head = self.head.forward(h2)
        return logits, (cache1, cache2, cache_head)

    def forward_dists(self, xs, tau_chord: float = 1.0, tau_rhythm: float = 1.0):
        """Per-step chord and rhythm distributions for the next symbol."""
        logits, _ = self.forward(xs)
        return (
            softmax_t(logits[..., :CHORD_DIM], tau_chord),
            softmax_t(logits[..., CHORD_DIM:], tau_rhythm),
        )

    def loss_and_grads(self, batch, alpha: float = 0.5):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        dtype = self.dtype
        xs = template_onehots(batch["in_chords"], batch["in_rhythms"], dtype)
        mask = batch["mask"]
        logits, cache = self.forward(xs)

        chord_ce, dchord = masked_cross_entropy(
            logits[..., :CHORD_DIM], batch["tgt_chords"], mask
        )
        rhythm_ce, drhythm = masked_cross_entropy(
            logits[..., CHORD_DIM:], batch["tgt_rhythms"], mask
        )
        loss = alpha * chord_ce + (1.0 - alpha) * rhythm_ce
        dlogits = np.concatenate(
            [alpha * dchord, (1.0 - alpha) * drhythm], axis=-1
        ).astype(dtype)

        cache1, cache2, cache_head = cache
        dh2, head_grads = self.head.backward(dlogits, cache_head)
        dh1, lstm2_grads = self.lstm2.backward(dh2, cache2)
        _, lstm1_grads = self.lstm1.backward(dh1, cache1)

        grads = {f"lstm1.{k}": v for k, v in lstm1_grads.items()}
        grads.update({f"lstm2.{k}": v for k, v in lstm2_grads.items()})
        grads.update({f"head.{k}": v for k, v in head_grads.items()})
        metrics = {"loss": loss, "chord_ce": chord_ce, "rhythm_ce": rhythm_ce}
        return metrics, grads

    # -- incremental interface for autoregressive sampling ------------------

    def init_state(self, batch: int = 1):
        return (self.lstm1.zero_state(batch), self.lstm2.zero_state(batch))

    def step(self, x, state):
        """One sampling step: (B, 62) input -> chord and rhythm logits."""
        if x.ndim != 2 or x.shape[1] != TEMPLATE_DIM:
            raise ShapeError(f"expected (B, {TEMPLATE_DIM}) input, got {x.shape}")
        (h1, c1), (h2, c2) = state
        h1, c1 = self.lstm1.step(x, h1, c1)
        h2, c2 = self.lstm2.step(h1, h2, c2)
        logits, _ = self.head.forward(h2)
        return logits[:, :CHORD_DIM], logits[:, CHORD_DIM:], ((h1, c1), (h2, c2))
