# -*- coding: utf-8 -*-
"""Small 2D convolution and average pooling on ``[N x C x H x W]`` arrays."""

from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv_output_hw(h: int, w: int, kernel: int, stride: int, padding: int) -> Tuple[int, int]:
    """Spatial extent after a square convolution."""
    return (h + 2 * padding - kernel) // stride + 1, (w + 2 * padding - kernel) // stride + 1


def _windows(x: np.ndarray, kernel: int, stride: int, padding: int) -> np.ndarray:
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    win = sliding_window_view(x, (kernel, kernel), axis=(2, 3))
    return win[:, :, ::stride, ::stride]


def conv2d_forward(
    x: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int = 1, padding: int = 0
) -> np.ndarray:
    """Cross-correlation; ``weight`` is ``[out x in x k x k]``."""
    kernel = weight.shape[-1]
    win = _windows(x, kernel, stride, padding)
    out = np.einsum("nchwij,ocij->nohw", win, weight, optimize=True)
    return out + bias.reshape(1, -1, 1, 1)


def conv2d_backward(
    dy: np.ndarray, x: np.ndarray, weight: np.ndarray, stride: int = 1, padding: int = 0
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients w.r.t. input, weight and bias."""
    kernel = weight.shape[-1]
    win = _windows(x, kernel, stride, padding)
    dweight = np.einsum("nohw,nchwij->ocij", dy, win, optimize=True)
    dbias = dy.sum(axis=(0, 2, 3))
    cols = np.einsum("nohw,ocij->nchwij", dy, weight, optimize=True)
    n, c, h, w = x.shape
    dpad = np.zeros((n, c, h + 2 * padding, w + 2 * padding), dtype=dy.dtype)
    ho, wo = dy.shape[2], dy.shape[3]
    for i in range(kernel):
        for j in range(kernel):
            dpad[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride] += cols[..., i, j]
    if padding:
        dpad = dpad[:, :, padding:-padding, padding:-padding]
    return dpad, dweight, dbias


def avg_pool_forward(x: np.ndarray, factor: int) -> np.ndarray:
    """Non-overlapping ``factor x factor`` mean pooling (extents must divide)."""
    if factor == 1:
        return x
    n, c, h, w = x.shape
    return x.reshape(n, c, h // factor, factor, w // factor, factor).mean(axis=(3, 5))


def avg_pool_backward(dy: np.ndarray, factor: int) -> np.ndarray:
    """Spread each pooled gradient evenly over its window."""
    if factor == 1:
        return dy
    spread = np.repeat(np.repeat(dy, factor, axis=2), factor, axis=3)
    return spread / (factor * factor)
