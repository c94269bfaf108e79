# -*- coding: utf-8 -*-
"""Time-decaying weight regularizer.

For step ``t`` (1-based) and every non-readout weight tensor ``W``::

    E(t)  = exp(delta * (t - 1)) - 1
    r(t)  = sum  lambda * W^2 / (1 + (|W| + eps) * E(t))
    dr/dW = lambda * (2W / D - W^2 * sign(W) * E / D^2),   D = 1 + (|W| + eps) * E

At ``t = 1`` (``E = 0``) this is plain L2; as ``t`` grows the penalty and
its gradient shrink, so early steps are constrained hardest.
"""

from typing import List, Mapping, Sequence, Union

import numpy as np

WeightSet = Union[Mapping[str, np.ndarray], Sequence[np.ndarray]]


def decay_term(t: int, delta: float) -> float:
    """``exp(delta * (t - 1)) - 1``; exactly 0 at ``t = 1``."""
    if t < 1:
        raise ValueError(f"timestep must be >= 1, got {t}")
    return float(np.expm1(delta * (t - 1)))


def _tensors(weights: WeightSet) -> List[np.ndarray]:
    if isinstance(weights, Mapping):
        return list(weights.values())
    return list(weights)


def trt_regularizer(weights: WeightSet, t: int, cfg) -> float:
    """Regularizer value ``r(t)``."""
    e = decay_term(t, cfg.delta)
    total = 0.0
    for w in _tensors(weights):
        denom = 1.0 + (np.abs(w) + cfg.epsilon) * e
        total += float(np.sum(w * w / denom))
    return cfg.lambda_ * total


def trt_regularizer_grad(weights: WeightSet, t: int, cfg) -> WeightSet:
    """``dr(t)/dW`` for every tensor, in the container type it was given."""
    e = decay_term(t, cfg.delta)

    def grad(w):
        denom = 1.0 + (np.abs(w) + cfg.epsilon) * e
        return cfg.lambda_ * (2.0 * w / denom - w * w * np.sign(w) * e / (denom * denom))

    if isinstance(weights, Mapping):
        return {name: grad(w) for name, w in weights.items()}
    return [grad(w) for w in weights]


def l2_penalty(weights: WeightSet, lam: float) -> float:
    """Time-constant ``lambda * sum W^2`` (the ``delta = 0`` baseline)."""
    return lam * sum(float(np.sum(w * w)) for w in _tensors(weights))
