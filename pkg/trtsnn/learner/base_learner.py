# -*- coding: utf-8 -*-
"""TRT-SNN Learner: data assembly, the epoch loop, evaluation and resume."""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from trtsnn.dataset.base_dataset import SpikeDataset
from trtsnn.dataset.base_dataset import make_loader
from trtsnn.dataset.events import load_event_dataset
from trtsnn.dataset.images import load_csv_images
from trtsnn.dataset.split import LabeledSamples
from trtsnn.dataset.split import split
from trtsnn.dataset.synthetic import corrupt_labels
from trtsnn.dataset.synthetic import load_spike_dataset
from trtsnn.dataset.synthetic import synth_generate
from trtsnn.diagnostics.fisher import FisherProfile
from trtsnn.diagnostics.fisher import fisher_profile
from trtsnn.diagnostics.report import write_fisher_csv
from trtsnn.learner.checkpoint import Checkpoint
from trtsnn.learner.checkpoint import CheckpointPointer
from trtsnn.learner.checkpoint import load_checkpoint
from trtsnn.learner.checkpoint import save_checkpoint
from trtsnn.learner.config import TrainConfig
from trtsnn.learner.config import build_config
from trtsnn.learner.metrics import MetricsRecord
from trtsnn.learner.metrics import write_metrics_csv
from trtsnn.learner.optimizer import Adam
from trtsnn.learner.optimizer import cosine_lr
from trtsnn.network.model import Parameters
from trtsnn.network.model import SNNModel
from trtsnn.network.model import apply_running_stats
from trtsnn.network.spec import build_network_spec
from trtsnn.objectives.losses import compute_loss
from trtsnn.objectives.losses import sdt_ce_loss
from trtsnn.tensor.rng import Rng
from trtsnn.utils.config import resolve_dtype
from trtsnn.utils.exception import CheckpointError
from trtsnn.utils.exception import ConfigError
from trtsnn.utils.exception import NonFiniteError
from trtsnn.utils.exception import NonFiniteLossError
from trtsnn.utils.tools import atomic_write_text


logger = logging.getLogger(__name__)

# Independent generator streams derived from the run seed.
INIT_STREAM, ORDER_STREAM, LABEL_NOISE_STREAM = 0, 1, 2


@dataclass
class TrainingData:
    train: SpikeDataset
    test: SpikeDataset
    classes: int


def _require_path(config: TrainConfig) -> str:
    if not config.data.path:
        raise ConfigError(f"data.source={config.data.source} needs data.path")
    return config.data.path


def _read_samples(config: TrainConfig, path: str) -> LabeledSamples:
    source = config.data.source
    if source == "spikes":
        return load_spike_dataset(path)
    if source == "csv":
        return load_csv_images(path)
    return load_event_dataset(path, config.T, tuple(config.data.frame_hw))


def load_training_data(config: TrainConfig) -> TrainingData:
    """Train/test datasets for ``config.data``; label noise hits the train split only."""
    dtype = resolve_dtype(config.precision)
    data = config.data
    if data.source == "synthetic":
        samples = synth_generate(data.synthetic_spec(config.T, config.seed), data.samples)
        parts = split(samples, data.split_ratio, config.seed)
        train, test = parts.train, parts.test
    else:
        samples = _read_samples(config, _require_path(config))
        if data.test_path:
            train, test = samples, _read_samples(config, data.test_path)
        else:
            parts = split(samples, data.split_ratio, config.seed)
            train, test = parts.train, parts.test
    classes = max(train.classes, test.classes)
    if data.label_noise > 0:
        noise_rng = Rng(config.seed).spawn(LABEL_NOISE_STREAM)
        train = LabeledSamples(
            inputs=train.inputs,
            labels=corrupt_labels(train.labels, data.label_noise, classes, noise_rng),
            classes=classes,
        )
    encode = config.T if data.source == "csv" else None
    if encode is None and train.inputs.shape[1] != config.T:
        raise ConfigError(f"data carries {train.inputs.shape[1]} timesteps but T={config.T}")
    logger.info("data: %d train / %d test samples, %d classes", len(train), len(test), classes)
    return TrainingData(
        train=SpikeDataset(train, encode_steps=encode, dtype=dtype),
        test=SpikeDataset(test, encode_steps=encode, dtype=dtype),
        classes=classes,
    )


class TRTLearner:
    """Owns one run: model, optimizer, data order, history and run directory."""

    def __init__(self, config: TrainConfig, data: Optional[TrainingData] = None, run_dir=None):
        self.config = config
        self.data = data or load_training_data(config)
        self.run_dir = Path(run_dir or config.run_dir)
        dtype = resolve_dtype(config.precision)
        spec = build_network_spec(
            input_shape=self.data.train.feature_shape,
            n_classes=self.data.classes,
            hidden=config.model.hidden,
            conv_channels=config.model.conv_channels,
            kernel=config.model.kernel,
            pool=config.model.pool,
            norm=config.model.norm,
            lif=config.lif,
            T=config.T,
        )
        seed_rng = Rng(config.seed)
        self.model = SNNModel.initialize(spec, seed_rng.spawn(INIT_STREAM), dtype)
        self.order_rng = seed_rng.spawn(ORDER_STREAM)
        self.optimizer = Adam(
            betas=tuple(config.optimizer.betas),
            eps=config.optimizer.eps,
            weight_decay=config.optimizer.weight_decay,
        )
        self.epoch = 0
        self.history: List[MetricsRecord] = []
        self.batch_losses: List[float] = []
        logger.info(
            "model: %d layers, %d parameters, loss %s",
            len(spec.layers),
            self.model.params.count(),
            config.loss.kind,
        )

    @property
    def checkpoint_dir(self) -> Path:
        return self.run_dir / "checkpoints"

    def learning_rate(self, epoch: int) -> float:
        """Rate used throughout 1-based ``epoch`` (stepped once per epoch)."""
        cfg = self.config
        return cosine_lr(epoch - 1, cfg.epochs, cfg.learning_rate, cfg.scheduler.min_lr)

    def train_epoch(self, epoch: int) -> dict:
        """One pass over the shuffled training set; returns sample-mean loss terms."""
        cfg = self.config
        lr = self.learning_rate(epoch)
        order = self.order_rng.permutation(len(self.data.train))
        loader = make_loader(self.data.train, cfg.batch_size, order)
        sums = {"total": 0.0, "ce": 0.0, "mse": 0.0, "reg": 0.0}
        seen = 0
        self.batch_losses = []
        for index, (inputs, labels) in enumerate(tqdm(loader, desc=f"epoch {epoch}", leave=False)):
            try:
                outputs, trace = self.model.forward(inputs, training=True)
                loss = compute_loss(outputs, labels, self.model.regularized_weights(), cfg.loss)
            except NonFiniteError as err:
                raise NonFiniteLossError(epoch, index, {"error": str(err)}) from err
            if not np.isfinite(loss.total):
                raise NonFiniteLossError(epoch, index, dict(loss.components, total=loss.total))
            grads = self.model.backward(trace, loss.output_grad)
            for name, g in loss.weight_grads.items():
                grads[name] = grads[name] + g
            params = apply_running_stats(self.model.params, trace)
            tensors = self.optimizer.step(params.tensors, grads, lr)
            self.model = self.model.with_params(Parameters(tensors=tensors, buffers=params.buffers))
            batch = len(labels)
            sums["total"] += loss.total * batch
            for key in ("ce", "mse", "reg"):
                sums[key] += loss.components[key] * batch
            seen += batch
            self.batch_losses.append(loss.total)
        return {"lr": lr, **{f"train_{k}": v / seen for k, v in sums.items()}}

    def evaluate(self, dataset: Optional[SpikeDataset] = None) -> Tuple[float, float]:
        """``(cross-entropy of the time-averaged output, accuracy)`` in eval mode."""
        if dataset is None:
            dataset = self.data.test
        if len(dataset) == 0:
            raise ValueError("cannot evaluate on an empty dataset")
        loss_sum, correct = 0.0, 0
        for inputs, labels in make_loader(dataset, self.config.batch_size):
            outputs, _ = self.model.forward(inputs, training=False)
            loss_sum += sdt_ce_loss(outputs, labels).total * len(labels)
            correct += int(np.sum(np.argmax(outputs.mean(axis=0), axis=1) == labels))
        return loss_sum / len(dataset), correct / len(dataset)

    def fisher_sample(self) -> np.ndarray:
        count = min(self.config.diagnostics.fisher_samples, len(self.data.train))
        inputs, _ = self.data.train.time_major(range(count))
        return inputs

    def _fisher_due(self, epoch: int) -> bool:
        every = self.config.diagnostics.fisher_every
        return bool(every) and (epoch == 1 or epoch % every == 0 or epoch == self.config.epochs)

    def fit(self) -> List[MetricsRecord]:
        """Train from the current epoch to ``config.epochs``, persisting as it goes."""
        cfg = self.config
        self.run_dir.mkdir(parents=True, exist_ok=True)
        atomic_write_text(self.run_dir / "config.txt", cfg.echo())
        for epoch in range(self.epoch + 1, cfg.epochs + 1):
            start = time.perf_counter()
            fragment = self.train_epoch(epoch)
            test_loss, test_acc = self.evaluate()
            profile = None
            if self._fisher_due(epoch):
                profile = fisher_profile(self.model, self.fisher_sample(), epoch)
            elapsed = time.perf_counter() - start
            record = MetricsRecord(
                epoch=epoch,
                test_loss=test_loss,
                test_acc=test_acc,
                ic=None if profile is None else profile.centroid,
                fisher=None if profile is None else [float(v) for v in profile.traces],
                seconds=elapsed if cfg.log_wall_clock else 0.0,
                **fragment,
            )
            self.history.append(record)
            self.epoch = epoch
            logger.info(
                "epoch %d/%d lr=%.3g train=%.5f test_loss=%.5f test_acc=%.4f (%.1f s)",
                epoch, cfg.epochs, record.lr, record.train_total, test_loss, test_acc, elapsed,
            )
            self.write_metrics()
            if cfg.checkpoint_every and (epoch % cfg.checkpoint_every == 0 or epoch == cfg.epochs):
                self.save_checkpoint()
        return self.history

    def write_metrics(self) -> None:
        write_metrics_csv(self.run_dir / "metrics.csv", self.history)
        profiles = [
            FisherProfile(traces=np.array(r.fisher), centroid=r.ic, epoch=r.epoch)
            for r in self.history
            if r.fisher is not None
        ]
        if profiles:
            write_fisher_csv(self.run_dir / "fisher.csv", profiles)

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            epoch=self.epoch,
            config=self.config.echo(),
            spec=self.model.spec,
            params=self.model.params,
            optimizer=self.optimizer.state,
            rng=self.order_rng.state,
            history=[r.to_dict() for r in self.history],
        )

    def save_checkpoint(self) -> Path:
        path = save_checkpoint(self.checkpoint_dir / f"epoch_{self.epoch:04d}.ckpt", self.checkpoint())
        CheckpointPointer.publish(path)
        return path

    def restore(self, ckpt: Checkpoint) -> None:
        """Continue exactly where ``ckpt`` was taken."""
        if ckpt.spec != self.model.spec:
            raise CheckpointError("checkpoint network does not match the configured network")
        self.model = self.model.with_params(ckpt.params)
        self.optimizer.state = ckpt.optimizer
        self.order_rng = Rng.from_state(ckpt.rng)
        self.epoch = ckpt.epoch
        self.history = [MetricsRecord.from_dict(row) for row in ckpt.history]
        logger.info("resumed at epoch %d", self.epoch)

    def resume(self, path=None) -> None:
        """Restore from ``path`` (file or directory), default the run's ``LATEST``."""
        self.restore(load_checkpoint(path or self.checkpoint_dir))

    @classmethod
    def from_checkpoint(cls, path, data: Optional[TrainingData] = None, **overrides) -> "TRTLearner":
        """Learner rebuilt from the config echoed inside a checkpoint."""
        ckpt = load_checkpoint(path)
        entries = dict(line.split("=", 1) for line in ckpt.config.splitlines() if "=" in line)
        entries.update({k: str(v) for k, v in overrides.items()})
        learner = cls(build_config(entries), data=data)
        learner.restore(ckpt)
        return learner
