# -*- coding: utf-8 -*-
"""TRT-SNN Dataset."""

from typing import Optional, Sequence, Tuple

import numpy as np
from torch.utils.data import DataLoader
from torch.utils.data import Dataset

from trtsnn.dataset.images import direct_encode
from trtsnn.dataset.split import LabeledSamples


class SpikeDataset(Dataset):
    """Sample-indexed view of :class:`LabeledSamples` yielding ``([T x ...], label)``.

    ``encode_steps`` turns static samples into ``T`` identical steps; spike
    samples already carry their time axis.
    """

    def __init__(self, samples: LabeledSamples, encode_steps: Optional[int] = None, dtype=None):
        """Initialize Spike Dataset."""
        self.samples = samples
        self.encode_steps = encode_steps
        self.dtype = np.dtype(dtype or np.float64)

    def __len__(self):
        """Return the length of the dataset."""
        return len(self.samples)

    def __getitem__(self, idx) -> Tuple[np.ndarray, int]:
        """Get an item from the dataset."""
        x = self.samples.inputs[idx].astype(self.dtype, copy=False)
        if self.encode_steps is not None:
            x = direct_encode(x, self.encode_steps)
        return x, int(self.samples.labels[idx])

    @property
    def steps(self) -> int:
        return self.encode_steps if self.encode_steps is not None else int(self.samples.inputs.shape[1])

    @property
    def feature_shape(self) -> Tuple[int, ...]:
        shape = self.samples.sample_shape
        return shape if self.encode_steps is not None else shape[1:]

    def time_major(self, index: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, np.ndarray]:
        """All (or ``index``) samples as one ``[T x N x ...]`` batch."""
        index = range(len(self)) if index is None else index
        return collate_time_major([self[i] for i in index])


def collate_time_major(items) -> Tuple[np.ndarray, np.ndarray]:
    """Stack ``(x[T x ...], label)`` pairs into ``x[T x B x ...]`` and ``labels[B]``."""
    inputs = np.stack([x for x, _ in items], axis=1)
    labels = np.array([label for _, label in items], dtype=np.int64)
    return np.ascontiguousarray(inputs), labels


def make_loader(dataset: SpikeDataset, batch_size: int, order: Optional[Sequence[int]] = None) -> DataLoader:
    """Batches in ``order`` (default: index order); the short last batch is kept."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    order = list(range(len(dataset))) if order is None else [int(i) for i in order]
    return DataLoader(
        dataset,
        batch_size=batch_size,
        sampler=order,
        drop_last=False,
        num_workers=0,
        collate_fn=collate_time_major,
    )
