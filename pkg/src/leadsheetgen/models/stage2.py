"""Melody models conditioned on a chord+rhythm template (stage two).

The template at the *predicted* positions runs through a two-layer
encoder; the encoder output at step i is concatenated with the previous
melody one-hot and fed to a two-layer LSTM plus a 130-way dense head.

With the bidirectional encoder the melody sees the entire template, past
and future, at every step.  :class:`NoBiLSTMBaseline` swaps the encoder
for plain LSTMs, so each prediction can only see the template up to its
own position; everything else stays identical.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..nn.layers import BiLSTM, Dense, LSTMLayer
from ..nn.ops import masked_cross_entropy, one_hot_steps, softmax_t
from ..vocab import MELODY_DIM, TEMPLATE_DIM
from .base import SequenceModel, template_onehots


class MelodyStageModel(SequenceModel):
    BIDIRECTIONAL: bool = True

    def __init__(self, hidden: int = 512, rng=None, dtype=np.float32):
        super().__init__()
        self.hidden = hidden
        context = 2 * hidden if self.BIDIRECTIONAL else hidden
        self.context_dim = context
        if self.BIDIRECTIONAL:
            encoder1 = BiLSTM(TEMPLATE_DIM, hidden, rng, dtype)
            encoder2 = BiLSTM(context, hidden, rng, dtype)
        else:
            encoder1 = LSTMLayer(TEMPLATE_DIM, hidden, rng, dtype)
            encoder2 = LSTMLayer(hidden, hidden, rng, dtype)
        self._register(
            enc1=encoder1,
            enc2=encoder2,
            lstm1=LSTMLayer(context + MELODY_DIM, hidden, rng, dtype),
            lstm2=LSTMLayer(hidden, hidden, rng, dtype),
            head=Dense(hidden, MELODY_DIM, rng, dtype),
        )

    def encode_template(self, template, valid=None):
        """(T, B, 62) template -> (T, B, context) states plus cache.

        ``valid`` is an optional (T, B) 0/1 mask flagging real template
        steps.  Padded slots pass encoder state through untouched, so the
        states at real positions are identical with and without trailing
        padding; generation (which never pads) therefore sees exactly the
        training-time context distribution.
        """
        ctx1, cache1 = self.enc1.forward(template, mask=valid)
        ctx2, cache2 = self.enc2.forward(ctx1, mask=valid)
        return ctx2, (cache1, cache2)

    def forward(self, template, melody_inputs, valid=None):
        """Teacher-forced pass; both arguments are (T, B, *) one-hots."""
        if template.shape[0] != melody_inputs.shape[0]:
            raise ShapeError(
                f"template length {template.shape[0]} != melody length "
                f"{melody_inputs.shape[0]}"
            )
        context, enc_cache = self.encode_template(template, valid)
        z = np.concatenate([context, melody_inputs], axis=-1)
        h1, cache1 = self.lstm1.forward(z)
        h2, cache2 = self.lstm2.forward(h1)
        logits, cache_head = self.head.forward(h2)
        return logits, (enc_cache, cache1, cache2, cache_head)

    def forward_dists(self, template, melody_inputs, tau_melody: float = 1.0):
        logits, _ = self.forward(template, melody_inputs)
        return softmax_t(logits, tau_melody)

    def loss_and_grads(self, batch):
        dtype = self.dtype
        template = template_onehots(batch["tgt_chords"], batch["tgt_rhythms"], dtype)
        valid = (batch["tgt_chords"] >= 0).astype(dtype)
        melody_inputs = one_hot_steps(batch["in_melodies"], MELODY_DIM, dtype)
        logits, cache = self.forward(template, melody_inputs, valid)
        melody_ce, dlogits = masked_cross_entropy(
            logits, batch["tgt_melodies"], batch["mask"]
        )
        dlogits = dlogits.astype(dtype)

        enc_cache, cache1, cache2, cache_head = cache
        dh2, head_grads = self.head.backward(dlogits, cache_head)
        dh1, lstm2_grads = self.lstm2.backward(dh2, cache2)
        dz, lstm1_grads = self.lstm1.backward(dh1, cache1)
        dcontext = dz[..., : self.context_dim]
        enc_cache1, enc_cache2 = enc_cache
        dctx1, enc2_grads = self.enc2.backward(dcontext, enc_cache2)
        _, enc1_grads = self.enc1.backward(dctx1, enc_cache1)

        grads = {f"enc1.{k}": v for k, v in enc1_grads.items()}
        grads.update({f"enc2.{k}": v for k, v in enc2_grads.items()})
        grads.update({f"lstm1.{k}": v for k, v in lstm1_grads.items()})
        grads.update({f"lstm2.{k}": v for k, v in lstm2_grads.items()})
        grads.update({f"head.{k}": v for k, v in head_grads.items()})
        metrics = {"loss": melody_ce, "melody_ce": melody_ce}
        return metrics, grads

    # -- incremental interface for autoregressive sampling ------------------

    def context_states(self, template):
        """Encoder pass over a full (T, 1, 62) template before sampling."""
        context, _ = self.encode_template(template, valid=None)
        return context

    def init_melody_state(self, batch: int = 1):
        return (self.lstm1.zero_state(batch), self.lstm2.zero_state(batch))

    def melody_step(self, context_t, melody_prev, state):
        """One sampling step from the step's context and previous melody."""
        z = np.concatenate([context_t, melody_prev], axis=-1)
        (h1, c1), (h2, c2) = state
        h1, c1 = self.lstm1.step(z, h1, c1)
        h2, c2 = self.lstm2.step(h1, h2, c2)
        logits, _ = self.head.forward(h2)
        return logits, ((h1, c1), (h2, c2))


class StageTwoModel(MelodyStageModel):
    ARCH_TAG = 2
    BIDIRECTIONAL = True


class NoBiLSTMBaseline(MelodyStageModel):
    """Ablation: identical except the template encoder cannot look ahead."""

    ARCH_TAG = 4
    BIDIRECTIONAL = False
