# -*- coding: utf-8 -*-
"""Checkpoint files and the ``LATEST`` pointer of a checkpoint directory.

A checkpoint is one msgpack document::

    format, version, epoch, config (flat key=value echo), spec,
    params {name: array}, buffers {name: array},
    optimizer {step, m {name: array}, v {name: array}},
    rng (generator state), history [metrics rows]

Names are written in sorted order, so loading a file and saving it again
reproduces it byte for byte.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from trtsnn.learner.optimizer import AdamState
from trtsnn.network.model import Parameters
from trtsnn.network.spec import NetworkSpec
from trtsnn.utils.exception import CheckpointError
from trtsnn.utils.msgpack_numpy import packb
from trtsnn.utils.msgpack_numpy import unpackb
from trtsnn.utils.tools import atomic_write_bytes
from trtsnn.utils.tools import atomic_write_text


logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "trtsnn-checkpoint"
CHECKPOINT_VERSION = 1
POINTER_NAME = "LATEST"

PathLike = Union[str, Path]


@dataclass
class Checkpoint:
    epoch: int
    config: str
    spec: NetworkSpec
    params: Parameters
    optimizer: AdamState
    rng: Dict[str, Any]
    history: List[dict] = field(default_factory=list)


def _sorted(arrays: Dict) -> Dict:
    return {name: arrays[name] for name in sorted(arrays)}


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "epoch": int(ckpt.epoch),
        "config": ckpt.config,
        "spec": ckpt.spec.model_dump(mode="json"),
        "params": _sorted(ckpt.params.tensors),
        "buffers": _sorted(ckpt.params.buffers),
        "optimizer": {
            "step": int(ckpt.optimizer.step),
            "m": _sorted(ckpt.optimizer.m),
            "v": _sorted(ckpt.optimizer.v),
        },
        "rng": dict(ckpt.rng),
        "history": list(ckpt.history),
    }
    return packb(payload)


def decode_checkpoint(blob: bytes, origin: str = "<bytes>") -> Checkpoint:
    try:
        payload = unpackb(blob)
    except Exception as err:
        raise CheckpointError(f"{origin}: not a msgpack document ({err})") from err
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{origin}: not a trtsnn checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"{origin}: unsupported checkpoint version {payload.get('version')}")
    try:
        optimizer = payload["optimizer"]
        return Checkpoint(
            epoch=int(payload["epoch"]),
            config=payload["config"],
            spec=NetworkSpec.model_validate(payload["spec"]),
            params=Parameters(tensors=dict(payload["params"]), buffers=dict(payload["buffers"])),
            optimizer=AdamState(m=dict(optimizer["m"]), v=dict(optimizer["v"]), step=int(optimizer["step"])),
            rng=dict(payload["rng"]),
            history=list(payload["history"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"{origin}: incomplete checkpoint ({err})") from err


def save_checkpoint(path: PathLike, ckpt: Checkpoint) -> Path:
    path = atomic_write_bytes(path, encode_checkpoint(ckpt))
    logger.info("saved checkpoint %s (epoch %d)", path, ckpt.epoch)
    return path


def load_checkpoint(path: PathLike) -> Checkpoint:
    path = Path(path)
    if path.is_dir():
        latest = CheckpointPointer.read(path)
        if latest is None:
            raise CheckpointError(f"{path}: no {POINTER_NAME} checkpoint pointer")
        path = latest
    if not path.is_file():
        raise CheckpointError(f"checkpoint {path} does not exist")
    return decode_checkpoint(path.read_bytes(), str(path))


class CheckpointPointer:
    """``LATEST`` names the newest complete checkpoint in its directory."""

    @staticmethod
    def read(directory: PathLike) -> Optional[Path]:
        """Path of the newest checkpoint, or ``None``."""
        pointer = Path(directory) / POINTER_NAME
        if not pointer.is_file():
            return None
        name = pointer.read_text(encoding="utf-8").strip()
        return Path(directory) / name if name else None

    @staticmethod
    def publish(ckpt_path: PathLike) -> Path:
        """Point ``LATEST`` at ``ckpt_path``, which must already be written."""
        ckpt_path = Path(ckpt_path)
        if not ckpt_path.is_file():
            raise CheckpointError(f"cannot publish missing checkpoint {ckpt_path}")
        return atomic_write_text(ckpt_path.parent / POINTER_NAME, os.path.basename(ckpt_path) + "\n")
