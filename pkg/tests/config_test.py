# -*- coding: utf-8 -*-
"""TRT-SNN Config Tests."""

import logging

import numpy as np
import pytest

from trtsnn.learner import PRESETS
from trtsnn.learner import build_config
from trtsnn.learner import load_config
from trtsnn.learner import with_overrides
from trtsnn.utils.config import nest
from trtsnn.utils.config import parse_overrides
from trtsnn.utils.config import read_kv_file
from trtsnn.utils.config import render_kv
from trtsnn.utils.config import resolve_dtype
from trtsnn.utils.config import runtime_settings
from trtsnn.utils.exception import ConfigError
from trtsnn.utils.exception import DataFormatError


def test_defaults():
    """Test an empty configuration validates to the documented defaults."""
    config = build_config({})
    assert config.loss.kind == "TRT"
    assert config.lif.gamma == 0.5
    assert config.optimizer.betas == [0.9, 0.999]
    assert config.data.source == "synthetic"
    assert config.checkpoint_every == 1


def test_presets():
    """Test every preset resolves and explicit keys beat the preset."""
    for name in PRESETS:
        config = build_config({"preset": name})
        assert config.epochs == 300
        assert config.batch_size == 64
    imagenet = build_config({"preset": "imagenet100"})
    assert imagenet.lif.gamma == 1.0
    assert imagenet.loss.eta == 0.001
    assert imagenet.loss.lambda_ == 5e-5
    dvs = build_config({"preset": "dvs-cifar10", "T": "6", "lif.gamma": "0.25"})
    assert dvs.T == 6
    assert dvs.lif.gamma == 0.25
    with pytest.raises(ConfigError):
        build_config({"preset": "mnist"})


def test_unknown_keys_are_reported():
    """Test misspelled keys surface by their dotted name."""
    with pytest.raises(ConfigError) as info:
        build_config({"epochz": "3", "loss.etaa": "0.1"})
    assert sorted(info.value.unknown_keys) == ["epochz", "loss.etaa"]
    with pytest.raises(ConfigError) as info:
        build_config({"epochs": "many"})
    assert info.value.unknown_keys == []
    assert "epochs" in str(info.value)


def test_load_config_layers(tmp_path):
    """Test preset < file < overrides and comment handling."""
    path = tmp_path / "run.cfg"
    path.write_text("# cifar-like\npreset=cifar\nepochs = 12  # short\n\nloss.lambda=2e-5\nmodel.hidden=32,16\n")
    config = load_config(path, {"epochs": "3"})
    assert config.epochs == 3
    assert config.loss.lambda_ == 2e-5
    assert config.loss.eta == 0.05
    assert config.model.hidden == [32, 16]
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    path.write_text("epochs=3\nnot an assignment\n")
    with pytest.raises(DataFormatError) as info:
        read_kv_file(path)
    assert info.value.line == 2


def test_echo_round_trip(tmp_path):
    """Test the echoed file reloads to an equal configuration."""
    config = build_config({"preset": "cifar", "loss.kind": "TET", "model.conv_channels": "4,8", "precision": "float32"})
    path = tmp_path / "config.txt"
    path.write_text(config.echo())
    assert "loss.lambda=1e-05" in config.echo().splitlines()
    assert load_config(path) == config


def test_with_overrides():
    """Test copies with overrides, including tau replacing an echoed gamma."""
    config = build_config({"lif.tau": "2.0"})
    changed = with_overrides(config, {"loss.kind": "SDT_CE", "seed": "3", "lif.tau": "4"})
    assert changed.loss.kind == "SDT_CE"
    assert changed.seed == 3
    assert changed.lif.gamma == 0.25
    assert config.seed == 0
    with pytest.raises(ConfigError):
        with_overrides(config, {"lif.gamma": "0.9", "lif.tau": "2.0"})


def test_parse_overrides():
    """Test command-line overrides parse and malformed ones raise."""
    assert parse_overrides(["--epochs=1", "--lif.tau=2", "--data.path=a=b"]) == {
        "epochs": "1",
        "lif.tau": "2",
        "data.path": "a=b",
    }
    with pytest.raises(ConfigError):
        parse_overrides(["epochs=1"])
    with pytest.raises(ConfigError):
        parse_overrides(["--epochs"])
    with pytest.raises(ConfigError):
        parse_overrides(["--=3"])


def test_nest_and_render():
    """Test dotted keys nest and render back sorted and flat."""
    tree = nest({"b.y": "2", "b.x": "1", "a": [1, 2], "c": None})
    assert tree.b.x == "1"
    assert render_kv(tree) == "a=1,2\nb.x=1\nb.y=2\n"


def test_runtime_settings(monkeypatch):
    """Test the environment picks the default dtype and log level."""
    monkeypatch.setenv("TRTSNN_DTYPE", "float32")
    monkeypatch.setenv("TRTSNN_LOG_LEVEL", "DEBUG")
    assert runtime_settings().log_level == "DEBUG"
    assert resolve_dtype() == np.float32
    assert resolve_dtype("float64") == np.float64
    monkeypatch.delenv("TRTSNN_DTYPE")
    assert resolve_dtype() == np.float64


def test_config_sources_are_logged(caplog, tmp_path):
    """Test file reads and command-line overrides leave a debug trail."""
    path = tmp_path / "run.cfg"
    path.write_text("epochs=3\nseed=1\n")
    with caplog.at_level(logging.DEBUG, logger="trtsnn.utils.config"):
        read_kv_file(path)
        parse_overrides(["--epochs=1", "--lif.tau=2"])
        parse_overrides([])
    assert caplog.messages == [f"read 2 keys from {path}", "overrides: epochs=1, lif.tau=2"]
