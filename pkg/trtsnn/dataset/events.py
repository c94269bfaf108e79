# -*- coding: utf-8 -*-
"""Event-camera streams: text format, binning into frames, manifests.

Event file layout (UTF-8)::

    width=W,height=H
    t,x,y,p
    ...

The first line declares the sensor extents. The ``t,x,y,p`` column header
is optional and may only precede the first event. Every event row holds
four integers: ``t`` is a timestamp in microseconds, ``x`` the column in
``[0, W)``, ``y`` the row in ``[0, H)`` and ``p`` the polarity (0 or 1).
Blank lines and lines starting with ``#`` are skipped. The loader sorts
events by timestamp (stable).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from trtsnn.dataset.split import LabeledSamples
from trtsnn.utils.exception import DataFormatError
from trtsnn.utils.tools import atomic_write_text


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

COLUMNS = "t,x,y,p"


@dataclass
class EventStream:
    """Parallel event columns plus sensor extents."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    width: int
    height: int

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def in_bounds(self) -> np.ndarray:
        return (self.x >= 0) & (self.x < self.width) & (self.y >= 0) & (self.y < self.height)


def _parse_extents(path, text: str) -> Tuple[int, int]:
    fields = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise DataFormatError(path, f"malformed header item {item.strip()!r}", 1)
        try:
            fields[key.strip()] = int(value)
        except ValueError:
            raise DataFormatError(path, f"non-integer header value {value.strip()!r}", 1) from None
    if set(fields) != {"width", "height"}:
        raise DataFormatError(path, "header must declare exactly width and height", 1)
    if fields["width"] <= 0 or fields["height"] <= 0:
        raise DataFormatError(path, "sensor extents must be positive", 1)
    return fields["width"], fields["height"]


def load_events(path: PathLike) -> EventStream:
    """Read an event file; every malformed row is reported with its line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataFormatError(path, "empty event file")
    width, height = _parse_extents(path, lines[0])
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not rows and line.replace(" ", "") == COLUMNS:
            continue
        cells = line.split(",")
        if len(cells) != 4:
            raise DataFormatError(path, f"expected 4 fields t,x,y,p, got {len(cells)}", lineno)
        try:
            t, x, y, p = (int(c) for c in cells)
        except ValueError:
            raise DataFormatError(path, f"non-integer field in {line!r}", lineno) from None
        if t < 0:
            raise DataFormatError(path, f"negative timestamp {t}", lineno)
        if not (0 <= x < width and 0 <= y < height):
            raise DataFormatError(path, f"coordinate ({x}, {y}) outside {width}x{height}", lineno)
        if p not in (0, 1):
            raise DataFormatError(path, f"polarity must be 0 or 1, got {p}", lineno)
        rows.append((t, x, y, p))
    data = np.array(rows, dtype=np.int64).reshape(-1, 4)
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    return EventStream(
        t=data[:, 0], x=data[:, 1], y=data[:, 2], p=data[:, 3], width=width, height=height
    )


def write_events(path: PathLike, stream: EventStream) -> Path:
    lines = [f"width={stream.width},height={stream.height}", COLUMNS]
    lines.extend(
        f"{int(t)},{int(x)},{int(y)},{int(p)}"
        for t, x, y, p in zip(stream.t, stream.x, stream.y, stream.p)
    )
    return atomic_write_text(path, "\n".join(lines) + "\n")


def bin_events(stream: EventStream, T: int, out_hw: Tuple[int, int]) -> np.ndarray:
    """Count events into ``[T x 2 x H' x W']`` frames.

    Block ``k`` covers ``[t_min + k*D, t_min + (k+1)*D)`` with
    ``D = (t_max - t_min) / T``; the last block is closed on the right.
    Pixels are pooled by integer block-sum (``y' = y * H' // H``), so every
    in-bounds event is counted exactly once.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    out_h, out_w = out_hw
    if out_h <= 0 or out_w <= 0 or stream.width <= 0 or stream.height <= 0:
        raise ValueError("frame and sensor extents must be positive")
    if len(stream) == 0:
        raise ValueError("cannot bin an empty event stream")
    mask = stream.in_bounds()
    dropped = int(len(stream) - mask.sum())
    if dropped:
        logger.debug("dropping %d out-of-bounds events", dropped)
    t = stream.t.astype(np.int64)
    t_min, t_max = int(t.min()), int(t.max())
    span = t_max - t_min
    if span == 0:
        block = np.zeros_like(t)
    else:
        block = np.minimum((t - t_min) * T // span, T - 1)
    rows = stream.y.astype(np.int64) * out_h // stream.height
    cols = stream.x.astype(np.int64) * out_w // stream.width
    frames = np.zeros((T, 2, out_h, out_w), dtype=np.float64)
    np.add.at(
        frames,
        (block[mask], stream.p.astype(np.int64)[mask], rows[mask], cols[mask]),
        1.0,
    )
    return frames


def normalize_frames(frames: np.ndarray) -> np.ndarray:
    """Divide by the sample's maximum count so values lie in ``[0, 1]``."""
    peak = float(frames.max()) if frames.size else 0.0
    if peak <= 0:
        return frames.copy()
    return frames / peak


def load_event_dataset(manifest: PathLike, T: int, out_hw: Tuple[int, int]) -> LabeledSamples:
    """Bin every ``path,label`` entry of ``manifest`` into normalized frames.

    Paths are relative to the manifest's directory; ``#`` lines are comments.
    """
    manifest = Path(manifest)
    entries = []
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, label = line.rpartition(",")
        if not sep or not name.strip():
            raise DataFormatError(manifest, "expected 'path,label'", lineno)
        try:
            label_value = int(label)
        except ValueError:
            raise DataFormatError(manifest, f"non-integer label {label.strip()!r}", lineno) from None
        if label_value < 0:
            raise DataFormatError(manifest, f"negative label {label_value}", lineno)
        entries.append((manifest.parent / name.strip(), label_value))
    if not entries:
        raise DataFormatError(manifest, "manifest lists no samples")
    inputs = np.stack([normalize_frames(bin_events(load_events(p), T, out_hw)) for p, _ in entries])
    labels = np.array([label for _, label in entries], dtype=np.int64)
    logger.info("loaded %d event samples from %s", len(entries), manifest)
    return LabeledSamples(inputs=inputs, labels=labels, classes=int(labels.max()) + 1)
