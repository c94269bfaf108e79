# -*- coding: utf-8 -*-
"""Per-epoch metrics rows and ``metrics.csv``."""

import csv
import io
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

from trtsnn.utils.tools import atomic_write_text
from trtsnn.utils.tools import format_float


METRICS_COLUMNS = (
    "epoch",
    "lr",
    "train_total",
    "train_ce",
    "train_mse",
    "train_reg",
    "test_loss",
    "test_acc",
    "ic",
    "seconds",
)


@dataclass
class MetricsRecord:
    """One epoch. ``test_loss`` is the cross-entropy of the time-averaged output."""

    epoch: int
    lr: float
    train_total: float
    train_ce: float
    train_mse: float
    train_reg: float
    test_loss: float
    test_acc: float
    ic: Optional[float] = None
    seconds: float = 0.0
    fisher: Optional[List[float]] = None

    def row(self) -> List[str]:
        values = [str(self.epoch)]
        values += [format_float(getattr(self, name)) for name in METRICS_COLUMNS[1:]]
        return values

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsRecord":
        return cls(**data)


def render_metrics(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    for record in records:
        writer.writerow(record.row())
    return buf.getvalue()


def write_metrics_csv(path: Union[str, Path], records: Iterable[MetricsRecord]) -> Path:
    """Rewrite the whole file; epochs must be increasing."""
    records = list(records)
    epochs = [r.epoch for r in records]
    if any(b <= a for a, b in zip(epochs, epochs[1:])):
        raise ValueError(f"metrics epochs must increase, got {epochs}")
    return atomic_write_text(path, render_metrics(records))
