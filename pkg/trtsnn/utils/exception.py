# -*- coding: utf-8 -*-
"""TRT-SNN Exceptions."""

from typing import Optional


class TRTSNNError(Exception):
    """Base class of every error raised by trtsnn."""


class ShapeMismatchError(TRTSNNError, ValueError):
    """Operand extents do not conform."""

    def __init__(self, message, expected=None, actual=None):
        if expected is not None or actual is not None:
            message = f"{message} (expected {expected}, got {actual})"
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class NonFiniteError(TRTSNNError, FloatingPointError):
    """A tensor produced by a public operation holds NaN or Inf."""

    def __init__(self, what: str, count: int = 0):
        super().__init__(f"{what} contains {count} non-finite value(s)")
        self.what = what
        self.count = count


class NonFiniteLossError(TRTSNNError, FloatingPointError):
    """Training loss became NaN/Inf, the epoch is aborted."""

    def __init__(self, epoch: int, batch: int, components: dict):
        detail = ", ".join(f"{k}={v!r}" for k, v in components.items())
        super().__init__(f"non-finite loss at epoch {epoch} batch {batch}: {detail}")
        self.epoch = epoch
        self.batch = batch
        self.components = components


class DataFormatError(TRTSNNError, ValueError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, path, message: str, line: Optional[int] = None):
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class ConfigError(TRTSNNError, ValueError):
    """Invalid configuration key or value; ``unknown_keys`` lists keys no section accepts."""

    def __init__(self, message: str, unknown_keys=()):
        super().__init__(message)
        self.unknown_keys = list(unknown_keys)


class CheckpointError(TRTSNNError, ValueError):
    """Checkpoint missing, corrupt or incompatible."""


class DiagnosticError(TRTSNNError, ValueError):
    """Diagnostic requested on an invalid model, layer or profile."""
