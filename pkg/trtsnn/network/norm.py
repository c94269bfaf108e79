# -*- coding: utf-8 -*-
"""Time-flattened batch normalization (tdBN).

Inputs are ``[T x B x C]`` or ``[T x B x C x H x W]``; statistics are taken
per channel over every other axis, so time, batch and spatial positions
form one flattened sample dimension.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from trtsnn.tensor.core import Tensor
from trtsnn.tensor.core import check_finite
from trtsnn.utils.exception import ShapeMismatchError


CHANNEL_AXIS = 2
BN_EPSILON = 1e-5
BN_MOMENTUM = 0.1


@dataclass(frozen=True)
class NormState:
    """Affine parameters and running statistics of one tdBN layer."""

    scale: Tensor
    shift: Tensor
    running_mean: Tensor
    running_var: Tensor
    epsilon_bn: float = BN_EPSILON
    momentum: float = BN_MOMENTUM

    def __post_init__(self):
        if np.any(self.running_var < 0):
            raise ValueError("running variance must be non-negative")
        if not 0.0 < self.momentum < 1.0:
            raise ValueError(f"momentum must lie in (0, 1), got {self.momentum}")
        if self.epsilon_bn <= 0:
            raise ValueError(f"epsilon_bn must be positive, got {self.epsilon_bn}")

    @property
    def channels(self) -> int:
        return int(self.scale.shape[0])


@dataclass(frozen=True)
class NormCache:
    """What the backward pass needs from one tdBN forward."""

    xhat: Tensor
    inv_std: Tensor
    scale: Tensor
    batch_mean: Optional[Tensor]
    batch_var: Optional[Tensor]
    count: int
    training: bool
    running_mean: Optional[Tensor] = None
    running_var: Optional[Tensor] = None

    def select(self, index) -> "NormCache":
        """Restrict to batch entries ``index`` (eval-mode caches only)."""
        if self.training:
            raise ValueError("training-mode statistics couple the batch; cannot slice")
        return NormCache(
            xhat=self.xhat[:, index],
            inv_std=self.inv_std,
            scale=self.scale,
            batch_mean=None,
            batch_var=None,
            count=self.count,
            training=False,
        )

    def truncate(self, steps: int) -> "NormCache":
        """Keep the first ``steps`` timesteps (eval-mode caches only)."""
        if self.training:
            raise ValueError("training-mode statistics couple timesteps; cannot truncate")
        return NormCache(
            xhat=self.xhat[:steps],
            inv_std=self.inv_std,
            scale=self.scale,
            batch_mean=None,
            batch_var=None,
            count=self.count,
            training=False,
        )


def _sample_axes(x: np.ndarray) -> Tuple[int, ...]:
    return tuple(axis for axis in range(x.ndim) if axis != CHANNEL_AXIS)


def _per_channel(v: np.ndarray, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[CHANNEL_AXIS] = -1
    return v.reshape(shape)


def tdbn_forward(x: Tensor, ns: NormState, training: bool) -> Tuple[Tensor, NormCache]:
    """Standardize per channel, then scale and shift.

    Training mode uses the flattened batch statistics and reports the updated
    running statistics in the returned cache; ``ns`` is never mutated. Eval
    mode uses the running statistics.
    """
    if x.ndim < 3 or x.shape[CHANNEL_AXIS] != ns.channels:
        raise ShapeMismatchError(
            "tdbn input channels", ns.channels, x.shape[CHANNEL_AXIS] if x.ndim >= 3 else x.shape
        )
    axes = _sample_axes(x)
    count = int(np.prod([x.shape[a] for a in axes]))
    if count == 0:
        raise ShapeMismatchError("tdbn over an empty flattened sample dimension", ">0", 0)

    if training:
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        unbiased = var * count / (count - 1) if count > 1 else var
        running_mean = (1.0 - ns.momentum) * ns.running_mean + ns.momentum * mean
        running_var = (1.0 - ns.momentum) * ns.running_var + ns.momentum * unbiased
    else:
        mean, var = ns.running_mean, ns.running_var
        running_mean = running_var = None

    inv_std = 1.0 / np.sqrt(var + ns.epsilon_bn)
    xhat = (x - _per_channel(mean, x.ndim)) * _per_channel(inv_std, x.ndim)
    y = _per_channel(ns.scale, x.ndim) * xhat + _per_channel(ns.shift, x.ndim)
    cache = NormCache(
        xhat=xhat,
        inv_std=inv_std,
        scale=ns.scale,
        batch_mean=mean if training else None,
        batch_var=var if training else None,
        count=count,
        training=training,
        running_mean=running_mean,
        running_var=running_var,
    )
    return check_finite(y, "tdbn output"), cache


def tdbn_backward(dy: Tensor, cache: NormCache) -> Tuple[Tensor, Tensor, Tensor]:
    """Gradients w.r.t. the input, the scale and the shift."""
    axes = _sample_axes(dy)
    ndim = dy.ndim
    dscale = np.sum(dy * cache.xhat, axis=axes)
    dshift = np.sum(dy, axis=axes)
    dxhat = dy * _per_channel(cache.scale, ndim)
    inv_std = _per_channel(cache.inv_std, ndim)
    if not cache.training:
        return dxhat * inv_std, dscale, dshift
    n = cache.count
    sum_dxhat = _per_channel(np.sum(dxhat, axis=axes), ndim)
    sum_dxhat_xhat = _per_channel(np.sum(dxhat * cache.xhat, axis=axes), ndim)
    dx = inv_std / n * (n * dxhat - sum_dxhat - cache.xhat * sum_dxhat_xhat)
    return dx, dscale, dshift
