"""Elementwise activations, softmax with temperature, and cross-entropy."""

from __future__ import annotations

import numpy as np

from ..errors import NumericFaultError

# Additive clip inside the log so a zero probability yields a large but
# finite loss (-log 1e-12 ~ 27.63) instead of infinity.
CE_EPSILON = 1e-12


def sigmoid(x):
    # Split by sign so exp never overflows.
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    ex = np.exp(x[~positive])
    out[~positive] = ex / (1.0 + ex)
    return out


def softmax_t(logits, tau=1.0):
    """Softmax over the last axis with temperature ``tau``.

    p_j = exp(z_j / tau - max_k z_k / tau) / sum.  Lower temperatures
    concentrate the distribution; the argmax never changes.
    """
    if tau <= 0:
        raise ValueError(f"temperature must be positive, got {tau}")
    logits = np.asarray(logits)
    z = logits / np.asarray(tau, dtype=logits.dtype)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(p, target_index: int) -> float:
    """-log p[target] with the epsilon clip; ``p`` is one distribution."""
    p = np.asarray(p)
    if p.ndim != 1:
        raise ValueError("cross_entropy expects a single distribution")
    if not 0 <= target_index < p.shape[0]:
        raise IndexError(f"target index {target_index} outside [0, {p.shape[0]})")
    return float(-np.log(p[target_index] + CE_EPSILON))


def masked_cross_entropy(logits, targets, mask):
    """Mean cross-entropy and its fused gradient over a masked batch.

    Args:
      logits: (T, B, V) unnormalized scores.
      targets: (T, B) class indices; entries under a zero mask are ignored.
      mask: (T, B) 0/1 weights.

    Returns:
      (mean_ce, dlogits): the mask-weighted mean of -log softmax(logits)
      at the targets, and its exact gradient (p - onehot) * mask / count.
    """
    logits = np.asarray(logits)
    T, B, V = logits.shape
    mask = np.asarray(mask, dtype=logits.dtype)
    total = mask.sum()
    p = softmax_t(logits, tau=1.0)
    if total == 0:
        return 0.0, np.zeros_like(logits)
    safe = np.where(mask > 0, targets, 0).astype(np.intp)
    rows = np.arange(T)[:, None], np.arange(B)[None, :]
    picked = p[rows[0], rows[1], safe]
    ce = -np.log(picked + CE_EPSILON) * mask
    dlogits = p.copy()
    dlogits[rows[0], rows[1], safe] -= 1.0
    dlogits *= (mask / total)[..., None]
    return float(ce.sum() / total), dlogits


def one_hot_steps(indices, dim: int, dtype=np.float32):
    """(T, B) index array -> (T, B, dim) one-hots; negatives become zeros."""
    indices = np.asarray(indices)
    out = np.zeros(indices.shape + (dim,), dtype=dtype)
    valid = indices >= 0
    coordinates = np.nonzero(valid)
    out[coordinates + (indices[valid],)] = 1
    return out


def glorot_uniform(rng, shape, dtype=np.float32):
    """Uniform init in [-s, s], s = sqrt(6 / (rows + cols))."""
    scale = np.sqrt(6.0 / sum(shape))
    return rng.uniform(-scale, scale, size=shape).astype(dtype)


def require_finite(name: str, *arrays) -> None:
    """Raise :class:`NumericFaultError` if any entry is NaN or infinite."""
    for array in arrays:
        if not np.all(np.isfinite(array)):
            raise NumericFaultError(f"non-finite values in {name}")
