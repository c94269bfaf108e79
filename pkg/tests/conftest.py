# -*- coding: utf-8 -*-
"""Shared fixtures and finite-difference helpers for the TRT-SNN tests."""

from typing import Callable, Sequence

import numpy as np
import pytest

from trtsnn.learner.config import build_config
from trtsnn.network.model import SNNModel
from trtsnn.network.spec import build_network_spec
from trtsnn.neuron.lif import LIFParams
from trtsnn.tensor.rng import Rng


def central_difference(fn: Callable[[], float], array: np.ndarray, index, h: float = 1e-5) -> float:
    """``d fn / d array[index]`` by a central difference; ``array`` is restored."""
    original = array[index]
    array[index] = original + h
    plus = fn()
    array[index] = original - h
    minus = fn()
    array[index] = original
    return (plus - minus) / (2.0 * h)


def numeric_gradient(fn: Callable[[], float], array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(array)
    for index in np.ndindex(*array.shape):
        grad[index] = central_difference(fn, array, index, h)
    return grad


def make_model(
    input_shape: Sequence[int] = (3,),
    classes: int = 3,
    hidden: Sequence[int] = (4,),
    conv_channels: Sequence[int] = (),
    T: int = 3,
    norm: bool = True,
    gamma: float = 0.5,
    pool: int = 1,
    seed: int = 0,
) -> SNNModel:
    spec = build_network_spec(
        input_shape=input_shape,
        n_classes=classes,
        hidden=hidden,
        conv_channels=conv_channels,
        pool=pool,
        norm=norm,
        lif=LIFParams(gamma=gamma),
        T=T,
    )
    return SNNModel.initialize(spec, Rng(seed), np.float64)


def spike_inputs(T: int, batch: int, shape: Sequence[int], seed: int = 0, rate: float = 0.4) -> np.ndarray:
    rng = Rng(seed)
    return rng.bernoulli(np.full((T, batch) + tuple(shape), rate))


@pytest.fixture
def model():
    return make_model()


@pytest.fixture
def batch():
    rng = Rng(7)
    inputs = rng.normal((3, 5, 3)) + 1.0
    labels = np.array([0, 1, 2, 1, 0])
    return inputs, labels


TINY_RUN = {
    "epochs": "2",
    "batch_size": "16",
    "learning_rate": "5e-3",
    "T": "4",
    "precision": "float64",
    "model.hidden": "8",
    "data.samples": "40",
    "data.classes": "4",
    "data.neurons": "8",
    "data.groups": "2",
    "data.peak_rate": "0.8",
    "diagnostics.fisher_samples": "8",
}


def tiny_config(run_dir, **overrides):
    """A two-epoch synthetic run small enough for unit tests."""
    entries = dict(TINY_RUN, run_dir=str(run_dir))
    entries.update({key.replace("__", "."): str(value) for key, value in overrides.items()})
    return build_config(entries)
