# -*- coding: utf-8 -*-
"""Output losses over per-step logits ``O[T x B x n]`` and their gradients.

* ``SDT_CE``  - cross-entropy of the time-averaged output.
* ``SDT_MSE`` - mean squared error of the time-averaged output vs one-hot.
* ``TET``     - per-step CE blended with per-step MSE toward a constant phi.
* ``TRT``     - per-step CE blended with per-step MSE toward the one-hot
  label, plus the time-decaying weight regularizer ``r(t)``.

Every loss returns the gradient w.r.t. each ``O(t)`` so the network
backward can start from it; TRT additionally returns ``dL/dW`` of its
regularizer, to be added to the BPTT weight gradients.
"""

from dataclasses import dataclass, field
from typing import Dict, Literal, Mapping, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from trtsnn.objectives.regularizer import l2_penalty
from trtsnn.objectives.regularizer import trt_regularizer
from trtsnn.objectives.regularizer import trt_regularizer_grad
from trtsnn.tensor.core import check_finite
from trtsnn.utils.exception import ShapeMismatchError


LossKind = Literal["SDT_CE", "SDT_MSE", "TET", "TRT"]


class LossConfig(BaseModel):
    """Objective selector and its hyperparameters."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    kind: LossKind = "TRT"
    eta: float = Field(0.05, ge=0.0, le=1.0)
    mu: float = Field(0.05, ge=0.0, le=1.0)
    lambda_: float = Field(1e-5, ge=0.0, alias="lambda")
    delta: float = Field(0.25, ge=0.0)
    epsilon: float = Field(1e-5, gt=0.0)
    phi: float = 0.0


@dataclass
class LossValue:
    """Total loss, its ledger and the gradients it hands to backward."""

    total: float
    components: Dict[str, float]
    coefficients: Dict[str, float]
    output_grad: np.ndarray
    weight_grads: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def build(cls, components, coefficients, output_grad, weight_grads=None) -> "LossValue":
        total = sum(coefficients[k] * components[k] for k in ("ce", "mse", "reg"))
        return cls(
            total=float(total),
            components={k: float(v) for k, v in components.items()},
            coefficients=dict(coefficients),
            output_grad=output_grad,
            weight_grads=weight_grads or {},
        )


def one_hot(labels: np.ndarray, n: int, dtype=np.float64) -> np.ndarray:
    """``[B] -> [B x n]`` one-hot rows."""
    labels = _check_labels(labels, n)
    encoded = np.zeros((labels.shape[0], n), dtype=dtype)
    encoded[np.arange(labels.shape[0]), labels] = 1.0
    return encoded


def _check_labels(labels, n: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeMismatchError("labels must be a vector", 1, labels.ndim)
    if labels.size and (labels.min() < 0 or labels.max() >= n):
        raise ValueError(f"labels must lie in [0, {n}), got range [{labels.min()}, {labels.max()}]")
    return labels.astype(np.int64)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax, shifted by the row max for stability."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def softmax_ce(logits: np.ndarray, labels) -> Tuple[float, np.ndarray]:
    """Batch-mean cross-entropy and its gradient ``(softmax - onehot) / B``."""
    batch, n = logits.shape
    labels = _check_labels(labels, n)
    if labels.shape[0] != batch:
        raise ShapeMismatchError("labels vs logits batch", batch, labels.shape[0])
    logp = log_softmax(logits)
    loss = -float(np.mean(logp[np.arange(batch), labels]))
    grad = (np.exp(logp) - one_hot(labels, n, logits.dtype)) / batch
    return loss, grad


def mse(pred: np.ndarray, target) -> Tuple[float, np.ndarray]:
    """Batch mean of ``(1/n) * sum_i (pred_i - target_i)^2`` and its gradient."""
    batch, n = pred.shape
    target = np.broadcast_to(np.asarray(target, dtype=pred.dtype), pred.shape)
    diff = pred - target
    loss = float(np.mean(np.sum(diff * diff, axis=1) / n))
    return loss, 2.0 * diff / (n * batch)


def _check_outputs(outputs: np.ndarray) -> np.ndarray:
    if outputs.ndim != 3 or outputs.shape[0] < 1:
        raise ShapeMismatchError("outputs must be [T, B, n] with T >= 1", "[T, B, n]", outputs.shape)
    return check_finite(outputs, "network outputs")


def sdt_ce_loss(outputs: np.ndarray, labels) -> LossValue:
    """Cross-entropy of the time-averaged output."""
    outputs = _check_outputs(outputs)
    steps = outputs.shape[0]
    loss, grad = softmax_ce(outputs.mean(axis=0), labels)
    output_grad = np.broadcast_to(grad / steps, outputs.shape).copy()
    return LossValue.build(
        {"ce": loss, "mse": 0.0, "reg": 0.0}, {"ce": 1.0, "mse": 0.0, "reg": 0.0}, output_grad
    )


def sdt_mse_loss(outputs: np.ndarray, onehot: np.ndarray) -> LossValue:
    """Squared error of the time-averaged output against the one-hot label."""
    outputs = _check_outputs(outputs)
    onehot = np.asarray(onehot, dtype=outputs.dtype)
    if onehot.shape != outputs.shape[1:]:
        raise ShapeMismatchError("one-hot targets vs outputs", outputs.shape[1:], onehot.shape)
    steps = outputs.shape[0]
    loss, grad = mse(outputs.mean(axis=0), onehot)
    output_grad = np.broadcast_to(grad / steps, outputs.shape).copy()
    return LossValue.build(
        {"ce": 0.0, "mse": loss, "reg": 0.0}, {"ce": 0.0, "mse": 1.0, "reg": 0.0}, output_grad
    )


def _per_step_blend(outputs, labels, target, weight_mse):
    """Step-mean CE and MSE plus the blended per-step output gradient."""
    steps = outputs.shape[0]
    ce_total = mse_total = 0.0
    output_grad = np.empty_like(outputs)
    for t in range(steps):
        ce_t, ce_grad = softmax_ce(outputs[t], labels)
        mse_t, mse_grad = mse(outputs[t], target)
        ce_total += ce_t
        mse_total += mse_t
        output_grad[t] = ((1.0 - weight_mse) * ce_grad + weight_mse * mse_grad) / steps
    return ce_total / steps, mse_total / steps, output_grad


def tet_loss(outputs: np.ndarray, labels, cfg: LossConfig) -> LossValue:
    """Per-step CE with an MSE pull toward ``phi`` weighted by ``mu``."""
    outputs = _check_outputs(outputs)
    ce, mse_value, output_grad = _per_step_blend(outputs, labels, cfg.phi, cfg.mu)
    return LossValue.build(
        {"ce": ce, "mse": mse_value, "reg": 0.0},
        {"ce": 1.0 - cfg.mu, "mse": cfg.mu, "reg": 0.0},
        output_grad,
    )


def trt_loss(
    outputs: np.ndarray,
    labels,
    onehot: np.ndarray,
    weights: Mapping[str, np.ndarray],
    cfg: LossConfig,
) -> LossValue:
    """Per-step CE/MSE blend (``eta``) plus the step-averaged ``r(t)``."""
    outputs = _check_outputs(outputs)
    steps = outputs.shape[0]
    onehot = np.asarray(onehot, dtype=outputs.dtype)
    if onehot.shape != outputs.shape[1:]:
        raise ShapeMismatchError("one-hot targets vs outputs", outputs.shape[1:], onehot.shape)
    ce, mse_value, output_grad = _per_step_blend(outputs, labels, onehot, cfg.eta)
    reg = 0.0
    weight_grads = {name: np.zeros_like(w) for name, w in weights.items()}
    if cfg.lambda_ > 0 and cfg.delta == 0:
        # no decay: r(t) is the same L2 term at every step
        reg = l2_penalty(weights, cfg.lambda_)
        weight_grads = {name: 2.0 * cfg.lambda_ * w for name, w in weights.items()}
    elif cfg.lambda_ > 0:
        for t in range(1, steps + 1):
            reg += trt_regularizer(weights, t, cfg)
            for name, g in trt_regularizer_grad(weights, t, cfg).items():
                weight_grads[name] += g
        reg /= steps
        weight_grads = {name: g / steps for name, g in weight_grads.items()}
    return LossValue.build(
        {"ce": ce, "mse": mse_value, "reg": reg},
        {"ce": 1.0 - cfg.eta, "mse": cfg.eta, "reg": 1.0},
        output_grad,
        weight_grads,
    )


def compute_loss(
    outputs: np.ndarray,
    labels,
    weights: Mapping[str, np.ndarray],
    cfg: LossConfig,
) -> LossValue:
    """Dispatch on ``cfg.kind``; ``weights`` are the regularized tensors."""
    n = outputs.shape[-1]
    if cfg.kind == "SDT_CE":
        return sdt_ce_loss(outputs, labels)
    if cfg.kind == "SDT_MSE":
        return sdt_mse_loss(outputs, one_hot(labels, n, outputs.dtype))
    if cfg.kind == "TET":
        return tet_loss(outputs, labels, cfg)
    return trt_loss(outputs, labels, one_hot(labels, n, outputs.dtype), weights, cfg)
