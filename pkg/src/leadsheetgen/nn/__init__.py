"""From-scratch differentiable numerical core.

numpy arrays are the tensor substrate; every forward pass, every gradient
(including backpropagation through time), and the optimizer are written out
explicitly in this package.  32-bit floats are the training default; pass
``dtype=numpy.float64`` when building models for finite-difference gradient
checking.
"""

from .adam import Adam, clip_by_global_norm, global_norm
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .layers import BiLSTM, Dense, LSTMLayer, lstm_step
from .ops import (
    cross_entropy,
    glorot_uniform,
    one_hot_steps,
    require_finite,
    sigmoid,
    softmax_t,
)

__all__ = [
    "Adam",
    "BiLSTM",
    "Checkpoint",
    "Dense",
    "LSTMLayer",
    "clip_by_global_norm",
    "cross_entropy",
    "global_norm",
    "glorot_uniform",
    "load_checkpoint",
    "lstm_step",
    "one_hot_steps",
    "require_finite",
    "save_checkpoint",
    "sigmoid",
    "softmax_t",
]
