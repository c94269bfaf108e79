# -*- coding: utf-8 -*-
"""Spiking network forward pass and exact BPTT.

Each hidden layer runs affine -> tdBN -> LIF over all ``T`` steps before the
next layer starts (tdBN needs the whole ``T x B`` slab). The readout is a
plain affine map whose per-step output is ``O(t)``.

Backward walks layers in reverse. Inside a hidden layer the membrane
gradient is accumulated in reverse time through the ``xi`` factors, so
weight gradients are exact for the surrogate (or, with ``smooth=True``, the
true gradient of the smoothed network).
"""

import copy
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from trtsnn.network.conv import avg_pool_backward
from trtsnn.network.conv import avg_pool_forward
from trtsnn.network.conv import conv2d_backward
from trtsnn.network.conv import conv2d_forward
from trtsnn.network.norm import NormCache
from trtsnn.network.norm import NormState
from trtsnn.network.norm import tdbn_backward
from trtsnn.network.norm import tdbn_forward
from trtsnn.network.spec import LayerSpec
from trtsnn.network.spec import NetworkSpec
from trtsnn.neuron.lif import lif_forward
from trtsnn.neuron.lif import temporal_backward
from trtsnn.tensor.core import Tensor
from trtsnn.tensor.core import check_finite
from trtsnn.tensor.core import default_dtype
from trtsnn.tensor.core import matmul
from trtsnn.tensor.core import seeded_normal
from trtsnn.tensor.rng import Rng
from trtsnn.utils.exception import ShapeMismatchError


Gradients = Dict[str, np.ndarray]
BatchIndex = Union[slice, Sequence[int]]


def pname(index: int, what: str) -> str:
    """Parameter / buffer name of layer ``index``."""
    return f"layer{index}.{what}"


@dataclass
class Parameters:
    """Trainable tensors plus non-trainable tdBN running statistics."""

    tensors: Dict[str, np.ndarray]
    buffers: Dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "Parameters":
        return Parameters(
            tensors={k: v.copy() for k, v in self.tensors.items()},
            buffers={k: v.copy() for k, v in self.buffers.items()},
        )

    def weights(self, spec: NetworkSpec, include_readout: bool = True) -> Dict[str, np.ndarray]:
        """Synaptic weight tensors (no biases or norm parameters)."""
        names = [
            pname(i, "weight")
            for i, layer in enumerate(spec.layers)
            if include_readout or not layer.is_readout
        ]
        return {name: self.tensors[name] for name in names}

    def count(self) -> int:
        return int(sum(v.size for v in self.tensors.values()))


@dataclass
class LayerTrace:
    """Cached forward quantities of one layer, time-major ``[T x B x ...]``."""

    inputs: Tensor
    x: Tensor
    norm: Optional[NormCache] = None
    u: Optional[Tensor] = None
    s: Optional[Tensor] = None
    out: Optional[Tensor] = None

    def _map(self, fn, norm_fn) -> "LayerTrace":
        return LayerTrace(
            inputs=fn(self.inputs),
            x=fn(self.x),
            norm=None if self.norm is None else norm_fn(self.norm),
            u=None if self.u is None else fn(self.u),
            s=None if self.s is None else fn(self.s),
            out=None if self.out is None else fn(self.out),
        )


@dataclass
class ForwardTrace:
    """Everything BPTT consumes, plus the outputs ``O[T x B x n]``."""

    layers: List[LayerTrace]
    outputs: Tensor
    training: bool
    smooth: bool = False

    @property
    def T(self) -> int:
        return int(self.outputs.shape[0])

    @property
    def batch(self) -> int:
        return int(self.outputs.shape[1])

    def truncate(self, steps: int) -> "ForwardTrace":
        """The trace of the same forward run over the first ``steps`` steps.

        Exact in eval mode, where every step only depends on its past.
        """
        if self.training:
            raise ValueError("only eval-mode traces can be truncated")
        if not 1 <= steps <= self.T:
            raise ValueError(f"truncation {steps} outside [1, {self.T}]")
        layers = [lt._map(lambda a: a[:steps], lambda c: c.truncate(steps)) for lt in self.layers]
        return replace(self, layers=layers, outputs=self.outputs[:steps])

    def select(self, index: BatchIndex) -> "ForwardTrace":
        """The trace restricted to batch entries ``index`` (eval mode)."""
        if self.training:
            raise ValueError("only eval-mode traces can be sliced by batch entry")
        layers = [lt._map(lambda a: a[:, index], lambda c: c.select(index)) for lt in self.layers]
        return replace(self, layers=layers, outputs=self.outputs[:, index])


@dataclass
class TemporalGradComponents:
    """Per hidden layer and step: same-step and carried-back gradient parts.

    ``spatial_norms`` / ``temporal_norms`` are ``||dL/du||_2`` of the two
    membrane-space summands, ``[layers x T]``. ``spatial_weight`` /
    ``temporal_weight`` hold the matching weight-space contributions
    ``[T x weight shape]`` whose sum over steps and parts is the weight
    gradient.
    """

    layers: List[int]
    spatial_norms: np.ndarray
    temporal_norms: np.ndarray
    spatial_weight: Dict[int, np.ndarray]
    temporal_weight: Dict[int, np.ndarray]

    def recombine(self) -> Dict[str, np.ndarray]:
        """Weight gradients rebuilt from the per-step parts."""
        return {
            pname(i, "weight"): (self.spatial_weight[i] + self.temporal_weight[i]).sum(axis=0)
            for i in self.layers
        }


def init_params(spec: NetworkSpec, rng: Rng, dtype=None) -> Parameters:
    """He-normal weights (std ``sqrt(2/fan_in)``), zero biases, unit tdBN scale."""
    dtype = dtype or default_dtype()
    tensors, buffers = {}, {}
    for index, layer in enumerate(spec.layers):
        std = float(np.sqrt(2.0 / layer.weight_fan_in))
        tensors[pname(index, "weight")] = seeded_normal(rng, layer.weight_shape, 0.0, std, dtype)
        tensors[pname(index, "bias")] = np.zeros(layer.units, dtype=dtype)
        if layer.has_norm:
            tensors[pname(index, "norm_scale")] = np.ones(layer.units, dtype=dtype)
            tensors[pname(index, "norm_shift")] = np.zeros(layer.units, dtype=dtype)
            buffers[pname(index, "running_mean")] = np.zeros(layer.units, dtype=dtype)
            buffers[pname(index, "running_var")] = np.ones(layer.units, dtype=dtype)
    return Parameters(tensors=tensors, buffers=buffers)


def _norm_state(params: Parameters, index: int) -> NormState:
    return NormState(
        scale=params.tensors[pname(index, "norm_scale")],
        shift=params.tensors[pname(index, "norm_shift")],
        running_mean=params.buffers[pname(index, "running_mean")],
        running_var=params.buffers[pname(index, "running_var")],
    )


def _affine(layer: LayerSpec, a: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    steps, batch = a.shape[:2]
    if layer.kind == "dense":
        flat = a.reshape(steps * batch, -1)
        x = matmul(flat, weight.T) + bias
        return x.reshape(steps, batch, layer.fan_out)
    x = conv2d_forward(a.reshape((steps * batch,) + a.shape[2:]), weight, bias, layer.stride, layer.padding)
    return x.reshape((steps, batch) + x.shape[1:])


def _affine_weight_grad(layer: LayerSpec, a: np.ndarray, weight: np.ndarray, dx: np.ndarray) -> np.ndarray:
    steps, batch = a.shape[:2]
    if layer.kind == "dense":
        return matmul(dx.reshape(steps * batch, -1).T, a.reshape(steps * batch, -1))
    _, dweight, _ = conv2d_backward(
        dx.reshape((steps * batch,) + dx.shape[2:]),
        a.reshape((steps * batch,) + a.shape[2:]),
        weight,
        layer.stride,
        layer.padding,
    )
    return dweight


def _affine_backward(layer: LayerSpec, a: np.ndarray, weight: np.ndarray, dx: np.ndarray):
    steps, batch = a.shape[:2]
    if layer.kind == "dense":
        flat_dx = dx.reshape(steps * batch, -1)
        flat_a = a.reshape(steps * batch, -1)
        dweight = matmul(flat_dx.T, flat_a)
        dbias = flat_dx.sum(axis=0)
        da = matmul(flat_dx, weight).reshape(a.shape)
        return dweight, dbias, da
    da, dweight, dbias = conv2d_backward(
        dx.reshape((steps * batch,) + dx.shape[2:]),
        a.reshape((steps * batch,) + a.shape[2:]),
        weight,
        layer.stride,
        layer.padding,
    )
    return dweight, dbias, da.reshape(a.shape)


def _pool(layer: LayerSpec, s: np.ndarray) -> np.ndarray:
    if layer.pool == 1:
        return s
    steps, batch = s.shape[:2]
    pooled = avg_pool_forward(s.reshape((steps * batch,) + s.shape[2:]), layer.pool)
    return pooled.reshape((steps, batch) + pooled.shape[1:])


def _unpool(layer: LayerSpec, g: np.ndarray) -> np.ndarray:
    if layer.pool == 1:
        return g
    steps, batch = g.shape[:2]
    spread = avg_pool_backward(g.reshape((steps * batch,) + g.shape[2:]), layer.pool)
    return spread.reshape((steps, batch) + spread.shape[1:])


def forward(
    spec: NetworkSpec,
    params: Parameters,
    inputs: Tensor,
    training: bool = True,
    smooth: bool = False,
):
    """Run ``inputs[T x B x *input_shape]`` through the network.

    Returns ``(O[T x B x n], trace)``. Pure: running statistics computed in
    training mode travel in the trace (see :func:`apply_running_stats`).
    """
    expected = (spec.T,) + tuple(spec.input_shape)
    actual = (inputs.shape[0],) + tuple(inputs.shape[2:])
    if inputs.ndim != len(spec.input_shape) + 2 or actual != expected:
        raise ShapeMismatchError("forward input extents ([T, B, *input_shape])", expected, actual)
    dtype = params.tensors[pname(0, "weight")].dtype
    a = check_finite(np.asarray(inputs, dtype=dtype), "network input")
    layer_traces = []
    outputs = None
    for index, layer in enumerate(spec.layers):
        weight = params.tensors[pname(index, "weight")]
        bias = params.tensors[pname(index, "bias")]
        x = check_finite(_affine(layer, a, weight, bias), f"layer {index} affine output")
        if layer.is_readout:
            layer_traces.append(LayerTrace(inputs=a, x=x))
            outputs = x
            break
        norm = None
        z = x
        if layer.has_norm:
            z, norm = tdbn_forward(x, _norm_state(params, index), training)
        u, s = lif_forward(z, spec.lif, smooth=smooth)
        out = _pool(layer, s)
        layer_traces.append(LayerTrace(inputs=a, x=x, norm=norm, u=u, s=s, out=out))
        a = out
    return outputs, ForwardTrace(layers=layer_traces, outputs=outputs, training=training, smooth=smooth)


def apply_running_stats(params: Parameters, trace: ForwardTrace) -> Parameters:
    """Parameters whose tdBN running statistics follow a training forward."""
    if not trace.training:
        return params
    buffers = dict(params.buffers)
    for index, layer_trace in enumerate(trace.layers):
        if layer_trace.norm is not None:
            buffers[pname(index, "running_mean")] = layer_trace.norm.running_mean
            buffers[pname(index, "running_var")] = layer_trace.norm.running_var
    return Parameters(tensors=params.tensors, buffers=buffers)


def _check_trace(spec: NetworkSpec, params: Parameters, trace: ForwardTrace, grad_outputs: np.ndarray):
    if len(trace.layers) != len(spec.layers):
        raise ShapeMismatchError("trace depth vs network depth", len(spec.layers), len(trace.layers))
    if grad_outputs.shape != trace.outputs.shape:
        raise ShapeMismatchError("dL/dO extents vs trace outputs", trace.outputs.shape, grad_outputs.shape)
    for index, layer_trace in enumerate(trace.layers):
        weight = params.tensors.get(pname(index, "weight"))
        if weight is None or weight.shape != spec.layers[index].weight_shape:
            raise ShapeMismatchError(
                f"layer {index} weight vs spec",
                spec.layers[index].weight_shape,
                None if weight is None else weight.shape,
            )


def _masked_weight_grads(layer, layer_trace, weight, part):
    """Weight-space contribution of each step of a membrane-gradient part."""
    contributions = np.zeros((part.shape[0],) + weight.shape, dtype=part.dtype)
    for t in range(part.shape[0]):
        masked = np.zeros_like(part)
        masked[t] = part[t]
        dx = tdbn_backward(masked, layer_trace.norm)[0] if layer_trace.norm is not None else masked
        contributions[t] = _affine_weight_grad(layer, layer_trace.inputs, weight, dx)
    return contributions


def _backward(spec, params, trace, grad_outputs, with_components=False):
    _check_trace(spec, params, trace, grad_outputs)
    grads = {}
    hidden = spec.hidden_indices
    steps = trace.T
    spatial_norms = np.zeros((len(hidden), steps))
    temporal_norms = np.zeros((len(hidden), steps))
    spatial_weight, temporal_weight = {}, {}

    g = grad_outputs
    for index in range(len(spec.layers) - 1, -1, -1):
        layer = spec.layers[index]
        layer_trace = trace.layers[index]
        weight = params.tensors[pname(index, "weight")]
        if layer.is_readout:
            dx = g
        else:
            grad_s = _unpool(layer, g)
            spatial, temporal = temporal_backward(grad_s, layer_trace.u, layer_trace.s, spec.lif)
            dz = spatial + temporal
            if layer_trace.norm is not None:
                dx, dscale, dshift = tdbn_backward(dz, layer_trace.norm)
                grads[pname(index, "norm_scale")] = dscale
                grads[pname(index, "norm_shift")] = dshift
            else:
                dx = dz
            if with_components:
                row = hidden.index(index)
                axes = tuple(range(1, spatial.ndim))
                spatial_norms[row] = np.sqrt(np.sum(spatial * spatial, axis=axes))
                temporal_norms[row] = np.sqrt(np.sum(temporal * temporal, axis=axes))
                spatial_weight[index] = _masked_weight_grads(layer, layer_trace, weight, spatial)
                temporal_weight[index] = _masked_weight_grads(layer, layer_trace, weight, temporal)
        dweight, dbias, da = _affine_backward(layer, layer_trace.inputs, weight, dx)
        grads[pname(index, "weight")] = dweight
        grads[pname(index, "bias")] = dbias
        g = da

    ordered = {name: check_finite(grads[name], f"gradient {name}") for name in params.tensors}
    components = None
    if with_components:
        components = TemporalGradComponents(
            layers=hidden,
            spatial_norms=spatial_norms,
            temporal_norms=temporal_norms,
            spatial_weight=spatial_weight,
            temporal_weight=temporal_weight,
        )
    return ordered, components


def backward(spec: NetworkSpec, params: Parameters, trace: ForwardTrace, grad_outputs: Tensor) -> Gradients:
    """Gradients of every parameter given ``dL/dO[T x B x n]``."""
    grads, _ = _backward(spec, params, trace, grad_outputs)
    return grads


def temporal_grad_components(
    spec: NetworkSpec, params: Parameters, trace: ForwardTrace, grad_outputs: Tensor
) -> TemporalGradComponents:
    """Split every hidden-layer gradient into same-step and carried-back parts."""
    _, components = _backward(spec, params, trace, grad_outputs, with_components=True)
    return components


class SNNModel:
    """A network description bound to its parameters."""

    def __init__(self, spec: NetworkSpec, params: Parameters):
        self.spec = spec
        self.params = params

    @classmethod
    def initialize(cls, spec: NetworkSpec, rng: Rng, dtype=None) -> "SNNModel":
        return cls(spec, init_params(spec, rng, dtype))

    def forward(self, inputs: Tensor, training: bool = False, smooth: bool = False):
        return forward(self.spec, self.params, inputs, training=training, smooth=smooth)

    def backward(self, trace: ForwardTrace, grad_outputs: Tensor) -> Gradients:
        return backward(self.spec, self.params, trace, grad_outputs)

    def temporal_grad_components(self, trace: ForwardTrace, grad_outputs: Tensor) -> TemporalGradComponents:
        return temporal_grad_components(self.spec, self.params, trace, grad_outputs)

    def weights(self, include_readout: bool = True) -> Dict[str, np.ndarray]:
        return self.params.weights(self.spec, include_readout)

    def regularized_weights(self) -> Dict[str, np.ndarray]:
        """Weights the time-decaying regularizer acts on: all but the readout."""
        return self.params.weights(self.spec, include_readout=False)

    def with_params(self, params: Parameters) -> "SNNModel":
        return SNNModel(self.spec, params)

    def with_lif(self, **changes) -> "SNNModel":
        """Same parameters, different neuron constants."""
        lif = self.spec.lif.model_copy(update=changes)
        return SNNModel(self.spec.model_copy(update={"lif": lif}), self.params)

    def clone(self) -> "SNNModel":
        return SNNModel(copy.deepcopy(self.spec), self.params.copy())
