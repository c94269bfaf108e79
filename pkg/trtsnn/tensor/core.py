# -*- coding: utf-8 -*-
"""Dense tensor substrate.

A ``Tensor`` is a plain ``numpy.ndarray`` of the configured float type
(``float64`` unless ``TRTSNN_DTYPE=float32``). The functions here are the
checked entry points: they validate extents and refuse NaN/Inf results
instead of letting them propagate.
"""

from typing import Sequence

import numpy as np
import numpy.typing as npt

from trtsnn.tensor.rng import Rng
from trtsnn.utils.config import resolve_dtype
from trtsnn.utils.exception import NonFiniteError
from trtsnn.utils.exception import ShapeMismatchError


Tensor = npt.NDArray[np.floating]


def default_dtype() -> np.dtype:
    """Float type used when none is requested explicitly."""
    return resolve_dtype()


def check_finite(x: np.ndarray, what: str = "tensor") -> np.ndarray:
    """Return ``x`` unchanged, raise ``NonFiniteError`` if it holds NaN/Inf."""
    finite = np.isfinite(x)
    if not finite.all():
        raise NonFiniteError(what, int(finite.size - np.count_nonzero(finite)))
    return x


def as_tensor(values, dtype=None, what: str = "tensor") -> Tensor:
    """Copy ``values`` into a finite tensor of the working float type."""
    x = np.array(values, dtype=dtype or default_dtype())
    return check_finite(x, what)


def zeros(shape: Sequence[int], dtype=None) -> Tensor:
    """All-zero tensor of the working float type."""
    return np.zeros(tuple(shape), dtype=dtype or default_dtype())


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of ``a[m x k]`` and ``b[k x n]``."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatchError("matmul expects rank-2 operands", "2, 2", f"{a.ndim}, {b.ndim}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError("matmul inner extents differ", a.shape[1], b.shape[0])
    return check_finite(a @ b, "matmul result")


def reduce_mean(x: Tensor, axis: int) -> Tensor:
    """Arithmetic mean along ``axis``; the axis is removed."""
    if not 0 <= axis < x.ndim:
        raise ShapeMismatchError("reduce_mean axis out of range", f"[0, {x.ndim})", axis)
    if x.shape[axis] == 0:
        raise ShapeMismatchError("reduce_mean over an empty axis", ">0", 0)
    return check_finite(np.mean(x, axis=axis), "reduce_mean result")


def seeded_normal(
    rng: Rng,
    shape: Sequence[int],
    mean: float = 0.0,
    std: float = 1.0,
    dtype=None,
) -> Tensor:
    """I.i.d. normal draws; ``std == 0`` gives a tensor filled with ``mean``."""
    if std < 0:
        raise ValueError(f"std must be non-negative, got {std}")
    draws = rng.normal(tuple(shape))
    out = mean + std * draws
    return check_finite(out.astype(dtype or default_dtype(), copy=False), "seeded_normal")

