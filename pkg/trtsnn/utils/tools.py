# -*- coding: utf-8 -*-
"""TRT-SNN Tools."""

import functools
import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Iterable, Union

import coloredlogs
import numpy as np


logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """Install colored console logging for the trtsnn logger tree."""
    coloredlogs.install(
        level=level.upper(),
        logger=logging.getLogger("trtsnn"),
        fmt=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def timed(func):
    """Decorator: log the wall time of ``func`` at DEBUG level."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            logger.debug("%s took %.3f s", func.__qualname__, time.perf_counter() - start)

    return wrapper


def atomic_write_bytes(path: Union[str, Path], payload: bytes) -> Path:
    """Write ``payload`` to ``path`` via a temp file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "wb") as fout:
            fout.write(payload)
            fout.flush()
            os.fsync(fout.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Text flavour of :func:`atomic_write_bytes` (UTF-8)."""
    return atomic_write_bytes(path, text.encode("utf-8"))


def format_float(value) -> str:
    """Shortest round-trip representation; empty string for ``None``."""
    if value is None:
        return ""
    return repr(float(value))


def median(values: Iterable[float]) -> float:
    """Median of a non-empty iterable of floats."""
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise ValueError("median of an empty sequence")
    return float(np.median(values))
