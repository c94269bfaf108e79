# -*- coding: utf-8 -*-
"""2D loss-landscape slices along filter-normalized random directions."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from tqdm import tqdm

from trtsnn.network.model import Parameters
from trtsnn.network.model import SNNModel
from trtsnn.tensor.rng import Rng
from trtsnn.utils.exception import DiagnosticError
from trtsnn.utils.exception import NonFiniteError
from trtsnn.utils.tools import timed


logger = logging.getLogger(__name__)

Direction = Dict[str, np.ndarray]
LossEvaluator = Callable[[SNNModel], float]


@dataclass
class LandscapeGrid:
    """``losses[i, j]`` is the loss at ``W + a[i] * d1 + b[j] * d2``.

    Non-finite losses are stored as NaN.
    """

    seeds: Tuple[int, int]
    a: np.ndarray
    b: np.ndarray
    losses: np.ndarray

    @property
    def center(self) -> float:
        return float(self.losses[self.a.size // 2, self.b.size // 2])


def filter_normalized_direction(model: SNNModel, rng: Rng) -> Direction:
    """Gaussian direction per weight tensor, each output unit rescaled to its weight norm.

    Output units are rows of a dense weight and filters of a conv weight.
    Biases and normalization parameters are not perturbed.
    """
    direction = {}
    for name, weight in model.weights().items():
        d = rng.normal(weight.shape).astype(weight.dtype)
        rows = d.reshape(d.shape[0], -1)
        target = np.linalg.norm(weight.reshape(weight.shape[0], -1), axis=1)
        current = np.linalg.norm(rows, axis=1)
        rows *= (target / (current + 1e-10))[:, None]
        direction[name] = rows.reshape(weight.shape)
    return direction


def grid_offsets(points: int, span: float) -> np.ndarray:
    """``points`` evenly spaced offsets over ``[-span, span]`` centered on 0."""
    if points < 1 or points % 2 == 0:
        raise DiagnosticError(f"grid extents must be odd so the grid centers at 0, got {points}")
    half = points // 2
    if half == 0:
        return np.zeros(1)
    return span * np.arange(-half, half + 1) / half


def _perturbed(params: Parameters, d1: Direction, d2: Direction, a: float, b: float) -> Parameters:
    tensors = dict(params.tensors)
    for name in d1:
        tensors[name] = params.tensors[name] + a * d1[name] + b * d2[name]
    return Parameters(tensors=tensors, buffers=params.buffers)


@timed
def landscape_2d(
    model: SNNModel,
    loss_fn: LossEvaluator,
    grid: Tuple[int, int] = (21, 21),
    span: float = 1.0,
    seeds: Tuple[int, int] = (0, 1),
    directions: Optional[Tuple[Direction, Direction]] = None,
) -> LandscapeGrid:
    """Evaluate ``loss_fn`` over the grid; ``model`` itself is never modified.

    ``directions`` overrides the seeded filter-normalized directions.
    """
    a_offsets = grid_offsets(grid[0], span)
    b_offsets = grid_offsets(grid[1], span)
    if directions is None:
        directions = (
            filter_normalized_direction(model, Rng(seeds[0])),
            filter_normalized_direction(model, Rng(seeds[1])),
        )
    d1, d2 = directions
    losses = np.empty((a_offsets.size, b_offsets.size))
    bad = 0
    with tqdm(total=losses.size, desc="landscape", leave=False) as pbar:
        for i, a in enumerate(a_offsets):
            for j, b in enumerate(b_offsets):
                try:
                    value = float(loss_fn(model.with_params(_perturbed(model.params, d1, d2, a, b))))
                except NonFiniteError:
                    value = float("nan")
                if not np.isfinite(value):
                    value = float("nan")
                    bad += 1
                losses[i, j] = value
                pbar.update(1)
    if bad:
        logger.warning("%d of %d landscape points are non-finite", bad, losses.size)
    return LandscapeGrid(seeds=tuple(seeds), a=a_offsets, b=b_offsets, losses=losses)
