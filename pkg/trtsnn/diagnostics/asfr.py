# -*- coding: utf-8 -*-
"""Average spike firing rate."""

from typing import Dict, Optional, Sequence

import numpy as np

from trtsnn.network.model import ForwardTrace
from trtsnn.utils.exception import DiagnosticError


def asfr(trace: ForwardTrace, layers: Optional[Sequence[int]] = None) -> Dict[int, float]:
    """Fraction of (neuron, sample, step) entries that spiked, per layer.

    ``layers`` defaults to every spiking layer of the trace.
    """
    if layers is None:
        layers = [i for i, lt in enumerate(trace.layers) if lt.s is not None]
    rates = {}
    for index in layers:
        if not 0 <= index < len(trace.layers):
            raise DiagnosticError(f"layer {index} does not exist")
        spikes = trace.layers[index].s
        if spikes is None:
            raise DiagnosticError(f"layer {index} does not spike (readout)")
        rates[index] = float(np.mean(spikes))
    return rates
