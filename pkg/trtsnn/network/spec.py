# -*- coding: utf-8 -*-
"""Layer stack description."""

from typing import List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from trtsnn.network.conv import conv_output_hw
from trtsnn.neuron.lif import LIFParams


class LayerSpec(BaseModel):
    """One affine stage. Hidden stages add tdBN (optional) and LIF."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["dense", "conv2d"] = "dense"
    fan_in: Optional[int] = Field(None, gt=0)
    fan_out: Optional[int] = Field(None, gt=0)
    in_channels: Optional[int] = Field(None, gt=0)
    out_channels: Optional[int] = Field(None, gt=0)
    kernel: int = Field(3, gt=0)
    stride: int = Field(1, gt=0)
    padding: int = Field(0, ge=0)
    pool: int = Field(1, gt=0)
    has_norm: bool = True
    is_readout: bool = False

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "dense":
            if self.fan_in is None or self.fan_out is None:
                raise ValueError("dense layers need fan_in and fan_out")
            if self.pool != 1:
                raise ValueError("pooling is only defined for conv2d layers")
        else:
            if self.in_channels is None or self.out_channels is None:
                raise ValueError("conv2d layers need in_channels and out_channels")
        if self.is_readout and (self.has_norm or self.kind != "dense"):
            raise ValueError("the readout is a dense layer without normalization")
        return self

    @property
    def weight_shape(self) -> Tuple[int, ...]:
        if self.kind == "dense":
            return (self.fan_out, self.fan_in)
        return (self.out_channels, self.in_channels, self.kernel, self.kernel)

    @property
    def units(self) -> int:
        """Output units of the affine map (channels for conv)."""
        return self.fan_out if self.kind == "dense" else self.out_channels

    @property
    def weight_fan_in(self) -> int:
        if self.kind == "dense":
            return self.fan_in
        return self.in_channels * self.kernel * self.kernel


class NetworkSpec(BaseModel):
    """Layers, neuron constants and simulation length.

    ``input_shape`` is the per-timestep feature shape: ``(features,)`` or
    ``(channels, height, width)``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    layers: List[LayerSpec]
    lif: LIFParams = LIFParams()
    T: int = Field(10, ge=1)
    input_shape: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_stack(self):
        if not self.layers:
            raise ValueError("a network needs at least the readout layer")
        readouts = [i for i, layer in enumerate(self.layers) if layer.is_readout]
        if readouts != [len(self.layers) - 1]:
            raise ValueError("exactly one readout layer is required and it must be last")
        self.layer_shapes()
        return self

    def layer_shapes(self) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Per-timestep (input, output) feature shape of every layer."""
        shapes = []
        current = tuple(self.input_shape)
        for index, layer in enumerate(self.layers):
            if layer.kind == "dense":
                flat = 1
                for extent in current:
                    flat *= extent
                if flat != layer.fan_in:
                    raise ValueError(f"layer {index}: fan_in {layer.fan_in} != incoming {flat}")
                out = (layer.fan_out,)
            else:
                if len(current) != 3 or current[0] != layer.in_channels:
                    raise ValueError(f"layer {index}: expected {layer.in_channels} input channels, got {current}")
                h, w = conv_output_hw(current[1], current[2], layer.kernel, layer.stride, layer.padding)
                if h <= 0 or w <= 0 or h % layer.pool or w % layer.pool:
                    raise ValueError(f"layer {index}: output {h}x{w} does not fit pool {layer.pool}")
                out = (layer.out_channels, h // layer.pool, w // layer.pool)
            shapes.append((current, out))
            current = out
        return shapes

    @property
    def n_classes(self) -> int:
        return self.layers[-1].fan_out

    @property
    def hidden_indices(self) -> List[int]:
        return [i for i, layer in enumerate(self.layers) if not layer.is_readout]


def build_network_spec(
    input_shape: Sequence[int],
    n_classes: int,
    hidden: Sequence[int] = (64,),
    conv_channels: Sequence[int] = (),
    kernel: int = 3,
    pool: int = 1,
    norm: bool = True,
    lif: Optional[LIFParams] = None,
    T: int = 10,
) -> NetworkSpec:
    """Conv stages (same padding), then dense hidden stages, then the readout."""
    layers = []
    shape = tuple(input_shape)
    for channels in conv_channels:
        if len(shape) != 3:
            raise ValueError("conv stages need a (channels, height, width) input")
        layer = LayerSpec(
            kind="conv2d",
            in_channels=shape[0],
            out_channels=channels,
            kernel=kernel,
            padding=kernel // 2,
            pool=pool,
            has_norm=norm,
        )
        h, w = conv_output_hw(shape[1], shape[2], kernel, 1, kernel // 2)
        shape = (channels, h // pool, w // pool)
        layers.append(layer)
    features = 1
    for extent in shape:
        features *= extent
    for units in hidden:
        layers.append(LayerSpec(kind="dense", fan_in=features, fan_out=units, has_norm=norm))
        features = units
    layers.append(
        LayerSpec(kind="dense", fan_in=features, fan_out=n_classes, has_norm=False, is_readout=True)
    )
    return NetworkSpec(layers=layers, lif=lif or LIFParams(), T=T, input_shape=tuple(input_shape))
