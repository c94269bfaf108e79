# -*- coding: utf-8 -*-
"""Iterative leaky integrate-and-fire neuron.

Forward dynamics (per step, elementwise)::

    u_pre  = gamma * u_prev + x
    s      = H(u_pre - u_th)                    # strict: equality does not fire
    u_post = (1 - s) * u_pre + s * u_reset      # hard reset

Backward uses the triangle surrogate ``(1/alpha^2) * max(0, alpha - |u - u_th|)``
in place of dH/du, evaluated at the pre-reset potential. The temporal
Jacobian of one step through charge, fire and reset is::

    xi = gamma * (1 - s - (u - u_reset) * surrogate(u))

which is ``gamma * (1 - s - u * surrogate(u))`` for the default ``u_reset = 0``.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from trtsnn.tensor.core import Tensor
from trtsnn.tensor.core import check_finite
from trtsnn.utils.exception import ShapeMismatchError


class LIFParams(BaseModel):
    """Neuron constants. ``tau`` may be given instead of ``gamma = 1/tau``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(0.5, gt=0.0, le=1.0)
    u_th: float = 1.0
    u_reset: float = 0.0
    alpha: float = Field(1.0, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def _tau_to_gamma(cls, data):
        if isinstance(data, dict) and "tau" in data:
            data = dict(data)
            tau = float(data.pop("tau"))
            if tau <= 0:
                raise ValueError(f"tau must be positive, got {tau}")
            if "gamma" in data and float(data["gamma"]) != 1.0 / tau:
                raise ValueError("give either tau or gamma, not both")
            data["gamma"] = 1.0 / tau
        return data

    @property
    def tau(self) -> float:
        """Membrane time constant."""
        return 1.0 / self.gamma


@dataclass(frozen=True)
class LIFStepResult:
    """One LIF step: charged potential, spikes, reset potential."""

    u_pre: Tensor
    s: Tensor
    u_post: Tensor


def _same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(what, a.shape, b.shape)


def heaviside(x: Tensor) -> Tensor:
    """1 where ``x > 0`` else 0."""
    return (np.asarray(x) > 0).astype(np.result_type(x, np.float32))


def surrogate_grad(u: Tensor, p: LIFParams) -> Tensor:
    """Triangle surrogate of dH/du, peak ``1/alpha`` at ``u == u_th``."""
    u = np.asarray(u)
    return np.maximum(0.0, p.alpha - np.abs(u - p.u_th)) / (p.alpha * p.alpha)


def smooth_spike(u: Tensor, p: LIFParams) -> Tensor:
    """C1 ramp from 0 to 1 over ``[u_th - alpha, u_th + alpha]``.

    Its derivative is exactly :func:`surrogate_grad`, which makes it the
    forward function whose true gradient the surrogate backward computes.
    """
    u = np.asarray(u)
    v = u - p.u_th
    a = p.alpha
    rising = (v + a) ** 2 / (2 * a * a)
    falling = 1.0 - (a - v) ** 2 / (2 * a * a)
    return np.where(v <= -a, 0.0, np.where(v >= a, 1.0, np.where(v <= 0, rising, falling)))


def lif_step(u_prev: Tensor, x_in: Tensor, p: LIFParams, smooth: bool = False) -> LIFStepResult:
    """Charge, fire and hard-reset one timestep."""
    _same_shape(u_prev, x_in, "lif_step inputs differ in shape")
    u_pre = p.gamma * u_prev + x_in
    s = smooth_spike(u_pre, p) if smooth else heaviside(u_pre - p.u_th)
    u_post = (1.0 - s) * u_pre + s * p.u_reset
    return LIFStepResult(u_pre=u_pre, s=s, u_post=u_post)


def lif_forward(x: Tensor, p: LIFParams, smooth: bool = False) -> Tuple[Tensor, Tensor]:
    """Run ``x[T x ...]`` through the neuron from ``u(0) = 0``.

    Returns the pre-reset potentials and spikes, both ``[T x ...]``.
    """
    u_pre = np.empty_like(x)
    s = np.empty_like(x)
    u = np.zeros_like(x[0])
    for t in range(x.shape[0]):
        step = lif_step(u, x[t], p, smooth=smooth)
        u_pre[t] = step.u_pre
        s[t] = step.s
        u = step.u_post
    check_finite(u_pre, "membrane potential")
    return u_pre, s


def xi_factor(u: Tensor, s: Tensor, p: LIFParams) -> Tensor:
    """Temporal Jacobian du(t+1)/du(t) through charge, fire and reset."""
    _same_shape(np.asarray(u), np.asarray(s), "xi_factor operands differ in shape")
    return p.gamma * (1.0 - s - (u - p.u_reset) * surrogate_grad(u, p))


def xi_product(trace: Iterable[Tuple[Tensor, Tensor]], p: LIFParams) -> Tensor:
    """Elementwise product of ``xi`` over a ``(u(t), s(t))`` trace."""
    product = None
    for u, s in trace:
        factor = xi_factor(u, s, p)
        product = factor if product is None else product * factor
    if product is None:
        raise ValueError("xi_product needs a non-empty trace")
    return product


def temporal_backward(
    grad_s: Tensor, u: Tensor, s: Tensor, p: LIFParams
) -> Tuple[Tensor, Tensor]:
    """Reverse-time membrane gradient split into its two summands.

    ``grad_s[t]`` is dL/ds(t) arriving from the layer above. The membrane
    gradient obeys ``du(t) = grad_s(t) * surrogate(u(t)) + xi(t) * du(t+1)``;
    the first summand (same-step, spatial path) and the second (carried
    back from later steps) are returned separately, both ``[T x ...]``.
    Their sum is dL/du(t).
    """
    for name, arr in (("u", u), ("s", s)):
        _same_shape(grad_s, arr, f"temporal_backward grad_s vs {name}")
    spatial = grad_s * surrogate_grad(u, p)
    xi = xi_factor(u, s, p)
    temporal = np.zeros_like(spatial)
    carry = np.zeros_like(spatial[0])
    for t in range(spatial.shape[0] - 1, -1, -1):
        # t = T-1 keeps temporal 0: nothing comes back from the future
        temporal[t] = xi[t] * carry
        carry = spatial[t] + temporal[t]
    return spatial, temporal


def membrane_grad(grad_s: Tensor, u: Tensor, s: Tensor, p: LIFParams) -> Tensor:
    """dL/du(t) for every step (sum of :func:`temporal_backward` parts)."""
    spatial, temporal = temporal_backward(grad_s, u, s, p)
    return spatial + temporal


def quiescent_bound(gamma: float, bound: float, steps: Sequence[int]) -> np.ndarray:
    """``(gamma * bound) ** n`` for each ``n`` in ``steps``."""
    return (gamma * bound) ** np.asarray(steps, dtype=np.float64)
