# -*- coding: utf-8 -*-
"""Adam with bias correction and the per-epoch cosine schedule."""

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from trtsnn.utils.exception import ShapeMismatchError


ADAM_EPSILON = 1e-8


@dataclass
class AdamState:
    """First/second moments per parameter name and the step counter."""

    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    def copy(self) -> "AdamState":
        return AdamState(
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
            step=self.step,
        )


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = ADAM_EPSILON,
    weight_decay: float = 0.0,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update; inputs are left untouched.

    ``weight_decay`` adds ``weight_decay * p`` to the gradient before the
    moments are updated (coupled L2).
    """
    beta1, beta2 = betas
    step = state.step + 1
    correction1 = 1.0 - beta1**step
    correction2 = 1.0 - beta2**step
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        if name not in grads:
            raise ShapeMismatchError(f"no gradient for parameter {name}")
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeMismatchError(f"gradient of {name}", p.shape, g.shape)
        if weight_decay:
            g = g + weight_decay * p
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m, v = np.zeros_like(p), np.zeros_like(p)
        elif m.shape != p.shape or v.shape != p.shape:
            raise ShapeMismatchError(f"Adam moments of {name}", p.shape, m.shape)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name], new_v[name] = m, v
    return new_params, AdamState(m=new_m, v=new_v, step=step)


class Adam:
    """Stateful wrapper binding betas, eps and weight decay to :func:`adam_step`."""

    def __init__(
        self,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = ADAM_EPSILON,
        weight_decay: float = 0.0,
        state: Optional[AdamState] = None,
    ):
        self.betas = tuple(betas)
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = state or AdamState()

    def step(self, params, grads, lr: float) -> Dict[str, np.ndarray]:
        new_params, self.state = adam_step(
            params, grads, self.state, lr, self.betas, self.eps, self.weight_decay
        )
        return new_params


def cosine_lr(epoch: int, total_epochs: int, base_lr: float, min_lr: float = 0.0) -> float:
    """``min + (base - min) * (1 + cos(pi * epoch / total)) / 2``."""
    if total_epochs < 1:
        raise ValueError(f"total_epochs must be >= 1, got {total_epochs}")
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs}]")
    return min_lr + (base_lr - min_lr) * (1.0 + math.cos(math.pi * epoch / total_epochs)) / 2.0
