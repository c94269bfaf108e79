# -*- coding: utf-8 -*-
"""Synthetic temporal spike classification task.

Input neurons are split into ``groups`` equal groups and time into
``ceil(classes / groups)`` equal windows. Class ``c`` fires group
``c % groups`` at ``peak_rate`` during window ``c // groups`` and stays at
``base_rate`` elsewhere, so telling classes apart needs both *which*
neurons fire and *when*. Independent background noise is merged in as
``1 - (1 - rate) * (1 - noise)``.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from trtsnn.dataset.split import LabeledSamples
from trtsnn.tensor.rng import Rng
from trtsnn.utils.exception import DataFormatError
from trtsnn.utils.msgpack_numpy import packb
from trtsnn.utils.msgpack_numpy import unpackb
from trtsnn.utils.tools import atomic_write_bytes


logger = logging.getLogger(__name__)

SPIKE_FORMAT = "trtsnn-spikes"
SPIKE_FORMAT_VERSION = 1


class SyntheticTaskSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    classes: int = Field(10, ge=1)
    neurons: int = Field(40, ge=1)
    T: int = Field(10, ge=1)
    groups: int = Field(5, ge=1)
    base_rate: float = Field(0.02, ge=0.0, le=1.0)
    peak_rate: float = Field(0.6, ge=0.0, le=1.0)
    noise: float = Field(0.02, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_layout(self):
        if self.groups > self.neurons:
            raise ValueError(f"{self.groups} groups do not fit {self.neurons} neurons")
        if self.windows > self.T:
            raise ValueError(f"{self.windows} time windows do not fit T={self.T}")
        return self

    @property
    def windows(self) -> int:
        return -(-self.classes // self.groups)


def synth_envelope(spec: SyntheticTaskSpec) -> np.ndarray:
    """Per-class spike probability ``[classes x T x neurons]``, noise included."""
    envelope = np.full((spec.classes, spec.T, spec.neurons), spec.base_rate)
    for c in range(spec.classes):
        group, window = c % spec.groups, c // spec.groups
        n0 = group * spec.neurons // spec.groups
        n1 = (group + 1) * spec.neurons // spec.groups
        t0 = window * spec.T // spec.windows
        t1 = (window + 1) * spec.T // spec.windows
        envelope[c, t0:t1, n0:n1] = spec.peak_rate
    return 1.0 - (1.0 - envelope) * (1.0 - spec.noise)


def synth_generate(spec: SyntheticTaskSpec, count: int) -> LabeledSamples:
    """``count`` Bernoulli samples ``[count x T x neurons]`` with uniform labels."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    rng = Rng(spec.seed)
    labels = rng.integers(0, spec.classes, (count,))
    envelope = synth_envelope(spec)
    inputs = rng.bernoulli(envelope[labels])
    logger.debug("generated %d synthetic samples (%d classes)", count, spec.classes)
    return LabeledSamples(inputs=inputs, labels=labels, classes=spec.classes)


def corrupt_labels(labels: np.ndarray, fraction: float, classes: int, rng: Rng) -> np.ndarray:
    """Reassign ``round(fraction * N)`` labels to a different random class."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"label-noise fraction must lie in [0, 1], got {fraction}")
    labels = np.asarray(labels, dtype=np.int64).copy()
    flips = int(round(fraction * labels.shape[0]))
    if flips == 0 or classes < 2:
        return labels
    chosen = rng.permutation(labels.shape[0])[:flips]
    labels[chosen] = (labels[chosen] + rng.integers(1, classes, (flips,))) % classes
    return labels


def save_spike_dataset(path: Union[str, Path], data: LabeledSamples, meta: dict = None) -> Path:
    payload = {
        "format": SPIKE_FORMAT,
        "version": SPIKE_FORMAT_VERSION,
        "classes": data.classes,
        "inputs": data.inputs,
        "labels": data.labels,
        "meta": meta or {},
    }
    return atomic_write_bytes(path, packb(payload))


def load_spike_dataset(path: Union[str, Path]) -> LabeledSamples:
    try:
        payload = unpackb(Path(path).read_bytes())
    except (OSError, ValueError) as err:
        raise DataFormatError(path, f"unreadable spike dataset: {err}") from err
    if not isinstance(payload, dict) or payload.get("format") != SPIKE_FORMAT:
        raise DataFormatError(path, "not a trtsnn spike dataset")
    if payload.get("version") != SPIKE_FORMAT_VERSION:
        raise DataFormatError(path, f"unsupported spike dataset version {payload.get('version')}")
    return LabeledSamples(inputs=payload["inputs"], labels=payload["labels"], classes=payload["classes"])
