# -*- coding: utf-8 -*-
"""Temporal-gradient vanishing probe.

For each neuron decay ``gamma`` the probe runs one eval-mode forward and
splits every hidden layer's membrane gradient into the same-step part
``grad_p(t)`` and the part carried back from later steps ``grad_t(t)``.
A step is flagged when ``grad_t(t) < 1e-6 * max_t' grad_t(t')``.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from trtsnn.network.model import SNNModel
from trtsnn.neuron.lif import quiescent_bound
from trtsnn.objectives.losses import LossConfig
from trtsnn.objectives.losses import compute_loss
from trtsnn.utils.exception import DiagnosticError


logger = logging.getLogger(__name__)

VANISHING_RATIO = 1e-6


@dataclass(frozen=True)
class VanishingRow:
    gamma: float
    layer: int
    t: int
    grad_p: float
    grad_t: float
    vanished: bool


def vanishing_probe(
    model: SNNModel,
    inputs: np.ndarray,
    labels: np.ndarray,
    gammas: Optional[Sequence[float]] = None,
    loss_cfg: Optional[LossConfig] = None,
) -> List[VanishingRow]:
    """Rows of ``(gamma, layer, t, ||grad_p(t)||, ||grad_t(t)||, vanished)``."""
    if model.spec.T < 2:
        raise DiagnosticError("the vanishing probe needs T >= 2")
    if not model.spec.hidden_indices:
        raise DiagnosticError("the network has no spiking layer to probe")
    loss_cfg = loss_cfg or LossConfig(kind="SDT_CE")
    gammas = list(gammas) if gammas else [model.spec.lif.gamma]
    rows = []
    for gamma in gammas:
        probe = model.with_lif(gamma=float(gamma))
        silent_decay = float(quiescent_bound(float(gamma), 1.0, [model.spec.T - 1])[0])
        outputs, trace = probe.forward(inputs, training=False)
        loss = compute_loss(outputs, labels, probe.regularized_weights(), loss_cfg)
        parts = probe.temporal_grad_components(trace, loss.output_grad)
        for row, layer in enumerate(parts.layers):
            spatial = parts.spatial_norms[row]
            temporal = parts.temporal_norms[row]
            floor = VANISHING_RATIO * float(temporal.max())
            flagged = 0
            for t in range(spatial.shape[0]):
                vanished = bool(temporal[t] < floor)
                flagged += vanished
                rows.append(
                    VanishingRow(
                        gamma=float(gamma),
                        layer=layer,
                        t=t + 1,
                        grad_p=float(spatial[t]),
                        grad_t=float(temporal[t]),
                        vanished=vanished,
                    )
                )
            logger.info(
                "gamma=%s layer %d: %d of %d steps vanished (silent-neuron decay over T-1 steps: %.3g)",
                gamma,
                layer,
                flagged,
                spatial.shape[0],
                silent_decay,
            )
    return rows
