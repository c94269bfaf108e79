# -*- coding: utf-8 -*-
"""TRT-SNN: temporal regularization training for spiking neural networks."""

from importlib.metadata import PackageNotFoundError
from importlib.metadata import version

try:
    __version__ = version(__package__)
except PackageNotFoundError:  # source checkout without install
    __version__ = "0.0.0"
