# -*- coding: utf-8 -*-
"""Static images from CSV and the constant-current encoding.

CSV layout (UTF-8)::

    # channels=C height=H width=W classes=K
    label,p_1,...,p_k        (k = C*H*W, row-major C, H, W; pixels in [0, 255])

Pixels are scaled to ``[0, 1]`` by ``/ 255``. The writer emits integer
pixels, so write followed by read reproduces the tensors exactly.
"""

from pathlib import Path
from typing import Dict, Union

import numpy as np

from trtsnn.dataset.split import LabeledSamples
from trtsnn.utils.exception import DataFormatError
from trtsnn.utils.tools import atomic_write_text


PathLike = Union[str, Path]
HEADER_KEYS = ("channels", "height", "width", "classes")


def _parse_header(path, line: str) -> Dict[str, int]:
    if not line.startswith("#"):
        raise DataFormatError(path, "first line must be '# channels=.. height=.. width=.. classes=..'", 1)
    fields = {}
    for item in line[1:].split():
        key, sep, value = item.partition("=")
        if not sep:
            raise DataFormatError(path, f"malformed header item {item!r}", 1)
        try:
            fields[key] = int(value)
        except ValueError:
            raise DataFormatError(path, f"non-integer header value {value!r}", 1) from None
    if set(fields) != set(HEADER_KEYS):
        raise DataFormatError(path, f"header must declare {', '.join(HEADER_KEYS)}", 1)
    if any(v <= 0 for v in fields.values()):
        raise DataFormatError(path, "header extents must be positive", 1)
    return fields


def load_csv_images(path: PathLike) -> LabeledSamples:
    """Images ``[N x C x H x W]`` in ``[0, 1]`` with their labels."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataFormatError(path, "empty image file")
    header = _parse_header(path, lines[0].strip())
    shape = (header["channels"], header["height"], header["width"])
    pixels = shape[0] * shape[1] * shape[2]
    labels, images = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != pixels + 1:
            raise DataFormatError(path, f"expected {pixels + 1} fields, got {len(cells)}", lineno)
        try:
            label = int(cells[0])
            values = np.array([float(c) for c in cells[1:]], dtype=np.float64)
        except ValueError:
            raise DataFormatError(path, "non-numeric cell", lineno) from None
        if not 0 <= label < header["classes"]:
            raise DataFormatError(path, f"label {label} outside [0, {header['classes']})", lineno)
        if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 255:
            raise DataFormatError(path, "pixels must lie in [0, 255]", lineno)
        labels.append(label)
        images.append(values.reshape(shape) / 255.0)
    if not images:
        raise DataFormatError(path, "no image rows")
    return LabeledSamples(inputs=np.stack(images), labels=np.array(labels), classes=header["classes"])


def write_csv_images(path: PathLike, images: np.ndarray, labels, classes: int) -> Path:
    """Write ``images[N x C x H x W]`` (values in ``[0, 1]``) as integer pixels."""
    if images.ndim != 4:
        raise ValueError(f"images must be [N, C, H, W], got {images.shape}")
    n, c, h, w = images.shape
    lines = [f"# channels={c} height={h} width={w} classes={classes}"]
    pixels = np.rint(np.clip(images, 0.0, 1.0) * 255.0).astype(np.int64).reshape(n, -1)
    for label, row in zip(np.asarray(labels), pixels):
        lines.append(",".join([str(int(label))] + [str(v) for v in row]))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def direct_encode(image: np.ndarray, T: int) -> np.ndarray:
    """Repeat ``image`` at each of ``T`` steps: ``[T x ...]``."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    image = np.asarray(image)
    return np.broadcast_to(image[None], (T,) + image.shape).copy()
