# -*- coding: utf-8 -*-
"""Labelled sample containers and the seeded train/test split."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from trtsnn.tensor.rng import Rng
from trtsnn.utils.exception import ShapeMismatchError


MIN_SPLIT_SAMPLES = 10


@dataclass
class LabeledSamples:
    """Sample-major inputs ``[N x ...]`` with integer labels in ``[0, classes)``.

    Spike data is ``[N x T x features...]``; static images are
    ``[N x C x H x W]`` and get their time axis from :func:`direct_encode`.
    """

    inputs: np.ndarray
    labels: np.ndarray
    classes: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.inputs.shape[0] != self.labels.shape[0]:
            raise ShapeMismatchError("inputs vs labels count", self.inputs.shape[0], self.labels.shape[0])
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.classes):
            raise ValueError(f"labels must lie in [0, {self.classes})")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def sample_shape(self) -> Tuple[int, ...]:
        return tuple(self.inputs.shape[1:])

    def subset(self, index: np.ndarray) -> "LabeledSamples":
        return LabeledSamples(inputs=self.inputs[index], labels=self.labels[index], classes=self.classes)


@dataclass
class DatasetSplit:
    """Disjoint train/test partition of one sample set."""

    train: LabeledSamples
    test: LabeledSamples
    train_index: np.ndarray
    test_index: np.ndarray
    ratio: float
    seed: int


def split(data: LabeledSamples, ratio: float = 0.9, seed: int = 0) -> DatasetSplit:
    """Seeded shuffle, then the first ``round(N * ratio)`` samples train."""
    total = len(data)
    if total < MIN_SPLIT_SAMPLES:
        raise ValueError(f"splitting needs at least {MIN_SPLIT_SAMPLES} samples, got {total}")
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must lie in (0, 1), got {ratio}")
    n_train = int(round(total * ratio))
    n_train = min(max(n_train, 1), total - 1)
    order = Rng(seed).permutation(total)
    train_index, test_index = order[:n_train], order[n_train:]
    return DatasetSplit(
        train=data.subset(train_index),
        test=data.subset(test_index),
        train_index=train_index,
        test_index=test_index,
        ratio=ratio,
        seed=seed,
    )
