"""The four architectures and a variant-name registry.

Checkpoint architecture tags: 1 = stage one (chord+rhythm), 2 = stage two
(melody with look-ahead), 3 = one-stage baseline, 4 = no-look-ahead
baseline.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..nn.checkpoint import load_checkpoint
from .base import SequenceModel
from .baseline import OneStageBaseline
from .stage1 import StageOneModel
from .stage2 import MelodyStageModel, NoBiLSTMBaseline, StageTwoModel

VARIANTS = {
    "stage1": StageOneModel,
    "stage2": StageTwoModel,
    "one-stage": OneStageBaseline,
    "no-bilstm": NoBiLSTMBaseline,
}

_BY_TAG = {cls.ARCH_TAG: cls for cls in VARIANTS.values()}


def build_model(variant: str, hidden: int = 512, rng=None, dtype=np.float32) -> SequenceModel:
    try:
        cls = VARIANTS[variant]
    except KeyError:
        raise ConfigError(
            "variant", f"unknown variant {variant!r}, expected one of {sorted(VARIANTS)}"
        )
    return cls(hidden=hidden, rng=rng, dtype=dtype)


def load_model(path, dtype=np.float32) -> SequenceModel:
    """Build the right architecture for a checkpoint file and load it."""
    checkpoint = load_checkpoint(path)
    cls = _BY_TAG.get(checkpoint.architecture_tag)
    if cls is None:
        from ..errors import IncompatibleCheckpointError

        raise IncompatibleCheckpointError(
            f"unknown architecture tag {checkpoint.architecture_tag}"
        )
    try:
        hidden = checkpoint.params["head.W"].shape[1]
    except KeyError:
        from ..errors import IncompatibleCheckpointError

        raise IncompatibleCheckpointError("checkpoint is missing the dense head")
    model = cls(hidden=hidden, dtype=dtype)
    model.load(path)
    return model


__all__ = [
    "MelodyStageModel",
    "NoBiLSTMBaseline",
    "OneStageBaseline",
    "SequenceModel",
    "StageOneModel",
    "StageTwoModel",
    "VARIANTS",
    "build_model",
    "load_model",
]
