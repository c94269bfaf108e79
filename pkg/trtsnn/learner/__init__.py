# -*- coding: utf-8 -*-
"""TRT-SNN Learner."""

from trtsnn.learner.base_learner import TRTLearner
from trtsnn.learner.base_learner import TrainingData
from trtsnn.learner.base_learner import load_training_data
from trtsnn.learner.checkpoint import Checkpoint
from trtsnn.learner.checkpoint import CheckpointPointer
from trtsnn.learner.checkpoint import load_checkpoint
from trtsnn.learner.checkpoint import save_checkpoint
from trtsnn.learner.config import PRESETS
from trtsnn.learner.config import TrainConfig
from trtsnn.learner.config import build_config
from trtsnn.learner.config import load_config
from trtsnn.learner.config import with_overrides
from trtsnn.learner.metrics import METRICS_COLUMNS
from trtsnn.learner.metrics import MetricsRecord
from trtsnn.learner.metrics import write_metrics_csv
from trtsnn.learner.optimizer import Adam
from trtsnn.learner.optimizer import AdamState
from trtsnn.learner.optimizer import adam_step
from trtsnn.learner.optimizer import cosine_lr
