"""Shared scaffolding for the four sequence models.

A model owns a fixed set of named layers; :meth:`parameters` flattens their
arrays into a ``"layer.array"``-keyed dict that the optimizer updates in
place and the checkpoint format serializes.  Subclasses implement
``loss_and_grads`` over a training batch (time-major index arrays plus a
target mask) and whatever sampling interface generation needs.
"""

from __future__ import annotations

import numpy as np

from .. import vocab
from ..errors import IncompatibleCheckpointError
from ..nn.checkpoint import load_checkpoint, save_checkpoint


class SequenceModel:
    ARCH_TAG: int = 0

    def __init__(self):
        self._modules: dict = {}
        self.layout_hash = vocab.layout_hash()

    def _register(self, **modules):
        self._modules.update(modules)
        for name, module in modules.items():
            setattr(self, name, module)

    def parameters(self) -> dict:
        out = {}
        for module_name, module in self._modules.items():
            for param_name, value in module.params().items():
                out[f"{module_name}.{param_name}"] = value
        return out

    def param_count(self) -> int:
        return sum(v.size for v in self.parameters().values())

    @property
    def dtype(self):
        return next(iter(self.parameters().values())).dtype

    def save(self, path) -> None:
        save_checkpoint(path, self.ARCH_TAG, self.parameters(), self.layout_hash)

    def load_state(self, params: dict) -> None:
        own = self.parameters()
        if params.keys() != own.keys():
            missing = sorted(set(own) ^ set(params))
            raise IncompatibleCheckpointError(f"parameter names do not match: {missing}")
        for name, value in params.items():
            if tuple(value.shape) != tuple(own[name].shape):
                raise IncompatibleCheckpointError(
                    f"parameter {name} has shape {tuple(value.shape)}, "
                    f"expected {tuple(own[name].shape)}"
                )
            own[name][...] = value.astype(own[name].dtype)

    def load(self, path) -> None:
        checkpoint = load_checkpoint(path)
        if checkpoint.architecture_tag != self.ARCH_TAG:
            raise IncompatibleCheckpointError(
                f"checkpoint architecture tag {checkpoint.architecture_tag}, "
                f"expected {self.ARCH_TAG}"
            )
        if checkpoint.layout_hash != vocab.layout_hash():
            raise IncompatibleCheckpointError(
                "checkpoint was written under a different vocabulary layout"
            )
        self.load_state(checkpoint.params)
        self.layout_hash = checkpoint.layout_hash


def template_onehots(chords, rhythms, dtype=np.float32) -> np.ndarray:
    """Concatenated chord+rhythm one-hots, shape (..., 62)."""
    from ..nn.ops import one_hot_steps

    return np.concatenate(
        [
            one_hot_steps(chords, vocab.CHORD_DIM, dtype),
            one_hot_steps(rhythms, vocab.RHYTHM_DIM, dtype),
        ],
        axis=-1,
    )
