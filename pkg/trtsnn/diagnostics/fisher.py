# -*- coding: utf-8 -*-
"""Per-timestep Fisher information trace and its centroid.

For a cutoff ``t`` the model's posterior is ``p = softmax(mean_{tau<=t} O(tau))``
and the trace of the empirical Fisher matrix is::

    I_t = (1/N) * sum_n sum_c p_c * || d log p_c / dW ||^2

with the exact expectation over the model's own classes. The forward is
run once in eval mode and truncated, so ``O(1..t)`` equals a forward of
length ``t``.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from trtsnn.network.model import ForwardTrace
from trtsnn.network.model import SNNModel
from trtsnn.network.model import pname
from trtsnn.objectives.losses import softmax
from trtsnn.utils.exception import DiagnosticError
from trtsnn.utils.tools import timed


logger = logging.getLogger(__name__)


@dataclass
class FisherProfile:
    """``I_1..I_T`` plus the information centroid (``None`` if all zero)."""

    traces: np.ndarray
    centroid: Optional[float]
    epoch: Optional[int] = None

    @property
    def T(self) -> int:
        return int(self.traces.shape[0])


def information_centroid(profile: Sequence[float]) -> float:
    """``sum t * I_t / sum I_t`` with 1-based ``t``."""
    values = np.asarray(profile, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DiagnosticError("the Fisher profile must be a non-empty vector")
    if np.any(values < 0):
        raise DiagnosticError("Fisher traces are non-negative")
    total = float(values.sum())
    if total <= 0:
        raise DiagnosticError("the information centroid of an all-zero profile is undefined")
    steps = np.arange(1, values.size + 1, dtype=np.float64)
    return float(np.dot(steps, values) / total)


def _weight_names(model: SNNModel) -> List[str]:
    return [pname(i, "weight") for i in range(len(model.spec.layers))]


def _sample_trace(model: SNNModel, trace: ForwardTrace, names: List[str]) -> float:
    """``sum_c p_c ||d log p_c/dW||^2`` for a one-sample, already truncated trace."""
    steps = trace.T
    probs = softmax(trace.outputs.mean(axis=0))[0]
    total = 0.0
    for c, p_c in enumerate(probs):
        # d log p_c / d mean_O = e_c - p, spread evenly over the t steps
        direction = -probs.copy()
        direction[c] += 1.0
        grad_outputs = np.broadcast_to(direction / steps, trace.outputs.shape).copy()
        grads = model.backward(trace, grad_outputs)
        total += float(p_c) * sum(float(np.sum(grads[name] * grads[name])) for name in names)
    return total


def _full_trace(model: SNNModel, inputs: np.ndarray) -> ForwardTrace:
    if inputs.ndim < 3 or inputs.shape[1] == 0:
        raise DiagnosticError("the Fisher sample must hold at least one input")
    _, trace = model.forward(inputs, training=False)
    return trace


def fisher_trace(model: SNNModel, inputs: np.ndarray, t: int) -> float:
    """``I_t`` over the ``N`` inputs of ``inputs[T x N x ...]``."""
    trace = _full_trace(model, inputs)
    if not 1 <= t <= trace.T:
        raise DiagnosticError(f"cutoff t={t} outside [1, {trace.T}]")
    return _trace_at(model, trace, t)


def _trace_at(model: SNNModel, trace: ForwardTrace, t: int) -> float:
    names = _weight_names(model)
    truncated = trace.truncate(t)
    total = 0.0
    for n in range(truncated.batch):
        total += _sample_trace(model, truncated.select([n]), names)
    return total / truncated.batch


@timed
def fisher_profile(model: SNNModel, inputs: np.ndarray, epoch: Optional[int] = None) -> FisherProfile:
    """``I_1..I_T`` and the centroid from one eval-mode forward."""
    trace = _full_trace(model, inputs)
    traces = np.array([_trace_at(model, trace, t) for t in range(1, trace.T + 1)])
    centroid = None
    if traces.sum() > 0:
        centroid = information_centroid(traces)
    else:
        logger.warning("Fisher profile is identically zero, centroid left empty")
    logger.info("Fisher profile (epoch %s): IC=%s", epoch, centroid)
    return FisherProfile(traces=traces, centroid=centroid, epoch=epoch)
