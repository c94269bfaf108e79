# -*- coding: utf-8 -*-
"""Training configuration, presets and the file/override merge."""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from trtsnn.dataset.synthetic import SyntheticTaskSpec
from trtsnn.neuron.lif import LIFParams
from trtsnn.objectives.losses import LossConfig
from trtsnn.utils.config import merge
from trtsnn.utils.config import nest
from trtsnn.utils.config import read_kv_file
from trtsnn.utils.config import render_kv
from trtsnn.utils.config import split_csv
from trtsnn.utils.exception import ConfigError


logger = logging.getLogger(__name__)


# Hyperparameter columns of the reference experiments (Adam, betas
# (0.9, 0.999), cosine annealing to 0, u_th 1, u_reset 0, alpha 1 everywhere).
PRESETS: Dict[str, Dict[str, str]] = {
    "cifar": {
        "epochs": "300", "batch_size": "64", "learning_rate": "1e-3", "T": "4",
        "lif.tau": "2.0", "loss.kind": "TRT", "loss.eta": "0.05",
        "loss.lambda": "1e-5", "loss.delta": "0.25", "loss.epsilon": "1e-5",
    },
    "imagenet100": {
        "epochs": "300", "batch_size": "64", "learning_rate": "1e-3", "T": "4",
        "lif.tau": "1.0", "loss.kind": "TRT", "loss.eta": "0.001",
        "loss.lambda": "5e-5", "loss.delta": "0.5", "loss.epsilon": "1e-5",
    },
    "dvs-cifar10": {
        "epochs": "300", "batch_size": "64", "learning_rate": "1e-3", "T": "10",
        "lif.tau": "2.0", "loss.kind": "TRT", "loss.eta": "0.001",
        "loss.lambda": "5e-5", "loss.delta": "0.5", "loss.epsilon": "1e-5",
    },
    "n-caltech101": {
        "epochs": "300", "batch_size": "64", "learning_rate": "1e-3", "T": "10",
        "lif.tau": "2.0", "loss.kind": "TRT", "loss.eta": "0.05",
        "loss.lambda": "5e-5", "loss.delta": "0.5", "loss.epsilon": "1e-5",
    },
}


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ModelSection(_Section):
    hidden: List[int] = [64]
    conv_channels: List[int] = []
    kernel: int = Field(3, gt=0)
    pool: int = Field(1, gt=0)
    norm: bool = True

    @field_validator("hidden", "conv_channels", mode="before")
    @classmethod
    def _split_lists(cls, value):
        return split_csv(value)


class DataSection(_Section):
    """Where samples come from.

    ``synthetic`` draws the temporal task, ``spikes`` reads a ``gen-data``
    file, ``csv`` reads CSV images, ``events`` reads an event manifest.
    ``test_path`` (if set) replaces the seeded split.
    """

    source: Literal["synthetic", "spikes", "csv", "events"] = "synthetic"
    path: Optional[str] = None
    test_path: Optional[str] = None
    split_ratio: float = Field(0.9, gt=0.0, lt=1.0)
    label_noise: float = Field(0.0, ge=0.0, le=1.0)
    samples: int = Field(1000, ge=10)
    classes: int = Field(10, ge=1)
    neurons: int = Field(40, ge=1)
    groups: int = Field(5, ge=1)
    base_rate: float = Field(0.02, ge=0.0, le=1.0)
    peak_rate: float = Field(0.6, ge=0.0, le=1.0)
    noise: float = Field(0.02, ge=0.0, le=1.0)
    frame_hw: List[int] = [32, 32]

    @field_validator("frame_hw", mode="before")
    @classmethod
    def _split_hw(cls, value):
        return split_csv(value)

    @field_validator("frame_hw")
    @classmethod
    def _two_extents(cls, value):
        if len(value) != 2 or min(value) <= 0:
            raise ValueError("frame_hw needs two positive extents")
        return value

    def synthetic_spec(self, T: int, seed: int) -> SyntheticTaskSpec:
        return SyntheticTaskSpec(
            classes=self.classes,
            neurons=self.neurons,
            T=T,
            groups=self.groups,
            base_rate=self.base_rate,
            peak_rate=self.peak_rate,
            noise=self.noise,
            seed=seed,
        )


class OptimizerSection(_Section):
    betas: List[float] = [0.9, 0.999]
    eps: float = Field(1e-8, gt=0.0)
    weight_decay: float = Field(0.0, ge=0.0)

    @field_validator("betas", mode="before")
    @classmethod
    def _split_betas(cls, value):
        return split_csv(value)

    @field_validator("betas")
    @classmethod
    def _two_betas(cls, value):
        if len(value) != 2 or not all(0.0 <= b < 1.0 for b in value):
            raise ValueError("betas needs two values in [0, 1)")
        return value


class SchedulerSection(_Section):
    min_lr: float = Field(0.0, ge=0.0)


class DiagnosticsSection(_Section):
    fisher_every: int = Field(0, ge=0)
    fisher_samples: int = Field(32, ge=1)


class TrainConfig(_Section):
    """Everything one training run needs. ``fisher_every = 0`` disables profiles."""

    preset: Optional[str] = None
    run_dir: str = "runs/default"
    epochs: int = Field(30, ge=1)
    batch_size: int = Field(64, ge=1)
    learning_rate: float = Field(1e-3, gt=0.0)
    T: int = Field(10, ge=1)
    seed: int = Field(0, ge=0)
    precision: Optional[Literal["float64", "float32"]] = None
    log_wall_clock: bool = False
    checkpoint_every: int = Field(1, ge=0)
    lif: LIFParams = LIFParams()
    loss: LossConfig = LossConfig()
    model: ModelSection = ModelSection()
    data: DataSection = DataSection()
    optimizer: OptimizerSection = OptimizerSection()
    scheduler: SchedulerSection = SchedulerSection()
    diagnostics: DiagnosticsSection = DiagnosticsSection()

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, value):
        if value is not None and value not in PRESETS:
            raise ValueError(f"unknown preset {value!r}; choose from {', '.join(sorted(PRESETS))}")
        return value

    def echo(self) -> str:
        """Flat ``key=value`` rendering that :func:`load_config` reads back."""
        return render_kv(self.model_dump(by_alias=True))


def _describe(err: ValidationError) -> str:
    parts = []
    for item in err.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def build_config(*layers: Mapping[str, str]) -> TrainConfig:
    """Validate flat dotted layers (later wins) on top of the named preset."""
    flat = {}
    for layer in layers:
        flat.update(layer)
    preset = flat.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
    base = dict(PRESETS.get(preset, {})) if preset else {}
    if "lif.gamma" in flat:
        base.pop("lif.tau", None)
    tree = merge(nest(base), nest(flat))
    try:
        return TrainConfig.model_validate(tree.to_dict())
    except ValidationError as err:
        unknown = [
            ".".join(str(p) for p in item["loc"])
            for item in err.errors()
            if item["type"] == "extra_forbidden"
        ]
        raise ConfigError(f"invalid configuration: {_describe(err)}", unknown) from None


def load_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, str]] = None
) -> TrainConfig:
    """Preset < file < overrides."""
    layers = []
    if path is not None:
        layers.append(read_kv_file(path))
    layers.append(dict(overrides or {}))
    config = build_config(*layers)
    logger.debug("configuration resolved: preset=%s loss=%s", config.preset, config.loss.kind)
    return config


def with_overrides(config: TrainConfig, overrides: Mapping[str, str]) -> TrainConfig:
    """A copy of ``config`` with dotted string overrides applied."""
    flat = dict(_flat_echo(config))
    if "lif.tau" in overrides:
        flat.pop("lif.gamma", None)
    flat.update(overrides)
    return build_config(flat)


def _flat_echo(config: TrainConfig) -> Dict[str, str]:
    entries = {}
    for line in config.echo().splitlines():
        key, _, value = line.partition("=")
        entries[key] = value
    return entries

