# -*- coding: utf-8 -*-
"""Flat ``key=value`` configuration files and process-level settings.

A config file holds one ``dotted.key=value`` per line; ``#`` starts a
comment, blank lines are ignored. Values stay strings here and are coerced
by the pydantic models that consume them. CLI overrides use the same syntax
prefixed by ``--``.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Mapping, Union

import numpy as np
from addict import Dict as AttrDict
from pydantic_settings import BaseSettings, SettingsConfigDict

from trtsnn.utils.exception import ConfigError, DataFormatError


logger = logging.getLogger(__name__)


class RuntimeSettings(BaseSettings):
    """Process settings read from ``TRTSNN_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="TRTSNN_")

    log_level: str = "INFO"
    dtype: Literal["float64", "float32"] = "float64"


def runtime_settings() -> RuntimeSettings:
    """Fresh settings snapshot (environment is re-read on every call)."""
    return RuntimeSettings()


def resolve_dtype(precision: Union[str, None] = None) -> np.dtype:
    """Element type for tensors: explicit ``precision`` or the environment."""
    return np.dtype(precision or runtime_settings().dtype)


def parse_assignment(text: str, origin: str = "<override>", line: int = None):
    """Split ``key=value``; raise with the origin when malformed."""
    if "=" not in text:
        if origin == "<override>":
            raise ConfigError(f"override {text!r} is not of the form key=value")
        raise DataFormatError(origin, f"expected key=value, got {text!r}", line)
    key, value = text.split("=", 1)
    key = key.strip()
    if not key:
        if origin == "<override>":
            raise ConfigError(f"override {text!r} has an empty key")
        raise DataFormatError(origin, "empty key", line)
    return key, value.strip()


def read_kv_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a flat config file into an ordered ``{dotted_key: value}`` map."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    entries = {}
    with open(path, "r", encoding="utf-8") as fin:
        for lineno, raw in enumerate(fin, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            key, value = parse_assignment(text, str(path), lineno)
            entries[key] = value
    logger.debug("read %d keys from %s", len(entries), path)
    return entries


def parse_overrides(args: Iterable[str]) -> Dict[str, str]:
    """Turn ``["--epochs=1", "--lif.tau=2"]`` into a dotted map."""
    entries = {}
    for arg in args:
        if not arg.startswith("--"):
            raise ConfigError(f"unexpected argument {arg!r}; overrides look like --key=value")
        key, value = parse_assignment(arg[2:])
        entries[key] = value
    if entries:
        logger.debug("overrides: %s", ", ".join(f"{k}={v}" for k, v in entries.items()))
    return entries


def nest(entries: Mapping[str, object]) -> AttrDict:
    """Expand dotted keys into a nested mapping."""
    tree = AttrDict()
    for dotted, value in entries.items():
        node = tree
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    return tree


def flatten(tree: Mapping, prefix: str = "") -> Dict[str, object]:
    """Inverse of :func:`nest` for echoing a config back to disk."""
    flat = {}
    for key, value in tree.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def merge(*layers: Mapping) -> AttrDict:
    """Deep-merge nested mappings, later layers win."""
    merged = AttrDict()
    for layer in layers:
        merged.update(AttrDict(layer))
    return merged


def split_csv(value) -> Union[List[str], object]:
    """Pydantic ``before`` hook: ``"a,b"`` becomes ``["a", "b"]``."""
    if isinstance(value, str):
        stripped = value.strip()
        if not stripped:
            return []
        return [item.strip() for item in stripped.split(",")]
    return value


def render_kv(tree: Mapping) -> str:
    """Render a nested mapping as a flat, sorted ``key=value`` document."""
    lines = []
    for key, value in sorted(flatten(tree).items()):
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(str(item) for item in value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
