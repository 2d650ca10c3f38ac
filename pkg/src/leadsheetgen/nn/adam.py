"""Adam optimizer with global-norm gradient clipping."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError


def global_norm(grads: dict) -> float:
    """sqrt of the summed squared entries across every gradient array."""
    total = 0.0
    for value in grads.values():
        flat = value.ravel()
        total += float(flat @ flat)
    return math.sqrt(total)


def clip_by_global_norm(grads: dict, max_norm: float) -> float:
    """Scale all gradients in place so their global norm is at most
    ``max_norm``; returns the pre-clip norm."""
    norm = global_norm(grads)
    if max_norm and norm > max_norm:
        scale = max_norm / norm
        for value in grads.values():
            value *= scale
    return norm


class Adam:
    """Bias-corrected Adam updating parameter arrays in place.

    ``params`` maps names to the live arrays of a model; ``step`` applies
    one update given a same-keyed gradient dict.  Clipping (when
    ``clip_norm`` is set) happens before the moment updates.
    """

    def __init__(
        self,
        params: dict,
        learning_rate: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
        clip_norm: float | None = 5.0,
    ):
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.clip_norm = clip_norm
        self.t = 0
        self.m = {name: np.zeros_like(value) for name, value in params.items()}
        self.v = {name: np.zeros_like(value) for name, value in params.items()}

    def step(self, grads: dict) -> None:
        if grads.keys() != self.params.keys():
            missing = set(self.params) ^ set(grads)
            raise ShapeError(f"gradient keys do not match parameters: {sorted(missing)}")
        for name, grad in grads.items():
            if grad.shape != self.params[name].shape:
                raise ShapeError(
                    f"gradient {name} has shape {grad.shape}, "
                    f"parameter has {self.params[name].shape}"
                )
        if self.clip_norm:
            clip_by_global_norm(grads, self.clip_norm)
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, grad in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(grad)
            update = (m / correction1) / (np.sqrt(v / correction2) + self.epsilon)
            self.params[name] -= self.learning_rate * update
