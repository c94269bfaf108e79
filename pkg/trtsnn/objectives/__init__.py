# -*- coding: utf-8 -*-
"""TRT-SNN Objectives."""

from trtsnn.objectives.losses import LossConfig
from trtsnn.objectives.losses import LossValue
from trtsnn.objectives.losses import compute_loss
from trtsnn.objectives.losses import log_softmax
from trtsnn.objectives.losses import mse
from trtsnn.objectives.losses import one_hot
from trtsnn.objectives.losses import sdt_ce_loss
from trtsnn.objectives.losses import sdt_mse_loss
from trtsnn.objectives.losses import softmax
from trtsnn.objectives.losses import softmax_ce
from trtsnn.objectives.losses import tet_loss
from trtsnn.objectives.losses import trt_loss
from trtsnn.objectives.regularizer import decay_term
from trtsnn.objectives.regularizer import l2_penalty
from trtsnn.objectives.regularizer import trt_regularizer
from trtsnn.objectives.regularizer import trt_regularizer_grad
