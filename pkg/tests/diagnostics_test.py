# -*- coding: utf-8 -*-
"""TRT-SNN Diagnostics Tests."""

import csv
import logging

import numpy as np
import pytest

from conftest import make_model
from conftest import spike_inputs
from trtsnn.diagnostics import LandscapeGrid
from trtsnn.diagnostics import asfr
from trtsnn.diagnostics import filter_normalized_direction
from trtsnn.diagnostics import fisher_profile
from trtsnn.diagnostics import fisher_trace
from trtsnn.diagnostics import grid_offsets
from trtsnn.diagnostics import information_centroid
from trtsnn.diagnostics import landscape_2d
from trtsnn.diagnostics import vanishing_probe
from trtsnn.diagnostics import write_fisher_csv
from trtsnn.diagnostics import write_landscape_csv
from trtsnn.diagnostics import write_vanishing_csv
from trtsnn.network import ForwardTrace
from trtsnn.network import LayerTrace
from trtsnn.network import SNNModel
from trtsnn.network import pname
from trtsnn.objectives import sdt_ce_loss
from trtsnn.objectives import softmax
from trtsnn.tensor import Rng
from trtsnn.utils.exception import DiagnosticError


def _brute_force_fisher(model, inputs, t):
    """Per-sample, per-class loop over separately run truncated forwards."""
    short = SNNModel(model.spec.model_copy(update={"T": t}), model.params)
    names = [pname(i, "weight") for i in range(len(model.spec.layers))]
    total = 0.0
    for n in range(inputs.shape[1]):
        outputs, trace = short.forward(inputs[:t, [n]], training=False)
        probs = softmax(outputs.mean(axis=0))[0]
        for c in range(probs.size):
            direction = -probs
            direction[c] += 1.0
            grads = short.backward(trace, np.broadcast_to(direction / t, outputs.shape).copy())
            total += probs[c] * sum(float(np.sum(grads[name] ** 2)) for name in names)
    return total / inputs.shape[1]


def _trained_like_model():
    model = make_model(input_shape=(4,), classes=3, hidden=(5,), T=4, seed=2)
    params = model.params.copy()
    params.buffers["layer0.running_mean"][...] = 0.2
    params.buffers["layer0.running_var"][...] = 0.5
    return model.with_params(params)


def test_information_centroid():
    """Test uniform, point-mass and hand-evaluated profiles."""
    assert information_centroid(np.ones(10)) == 5.5
    assert information_centroid([1.0] + [0.0] * 9) == 1.0
    assert information_centroid([0.0, 0.0, 4.0]) == 3.0
    assert information_centroid([1.0, 2.0, 3.0]) == pytest.approx(14.0 / 6.0, rel=1e-15)
    for bad in ([0.0, 0.0], [], [1.0, -1.0]):
        with pytest.raises(DiagnosticError):
            information_centroid(bad)


def test_information_centroid_moves_with_mass():
    """Test moving mass toward early steps lowers the centroid, staying in [1, T]."""
    rng = Rng(1)
    for _ in range(50):
        profile = rng.uniform((8,)) + 0.01
        centroid = information_centroid(profile)
        assert 1.0 <= centroid <= 8.0
        moved = profile.copy()
        moved[0] += 0.5 * moved[-1]
        moved[-1] *= 0.5
        assert information_centroid(moved) < centroid


def test_fisher_trace_matches_brute_force():
    """Test batched Fisher traces against the per-sample loop."""
    model = _trained_like_model()
    inputs = spike_inputs(4, 5, (4,), seed=3, rate=0.6)
    for t in range(1, 5):
        expected = _brute_force_fisher(model, inputs, t)
        assert fisher_trace(model, inputs, t) == pytest.approx(expected, rel=1e-10, abs=1e-300)
    profile = fisher_profile(model, inputs, epoch=3)
    assert profile.T == 4
    assert profile.epoch == 3
    assert np.all(profile.traces >= 0)
    np.testing.assert_allclose(profile.traces, [fisher_trace(model, inputs, t) for t in range(1, 5)], rtol=1e-12)
    if profile.traces.sum() > 0:
        assert profile.centroid == pytest.approx(information_centroid(profile.traces), rel=1e-12)


def test_fisher_trace_properties():
    """Test duplication invariance, the one-class case and argument checks."""
    model = _trained_like_model()
    inputs = spike_inputs(4, 3, (4,), seed=4, rate=0.6)
    doubled = np.concatenate([inputs, inputs], axis=1)
    assert fisher_trace(model, doubled, 4) == pytest.approx(fisher_trace(model, inputs, 4), rel=1e-12)

    single = make_model(input_shape=(4,), classes=1, hidden=(3,), T=2)
    zero = fisher_profile(single, spike_inputs(2, 1, (4,)))
    np.testing.assert_array_equal(zero.traces, 0.0)
    assert zero.centroid is None

    with pytest.raises(DiagnosticError):
        fisher_trace(model, inputs, 0)
    with pytest.raises(DiagnosticError):
        fisher_trace(model, inputs, 5)
    with pytest.raises(DiagnosticError):
        fisher_trace(model, inputs[:, :0], 1)


def test_vanishing_probe_rows():
    """Test probe rows mirror the gradient decomposition for every gamma."""
    model = make_model(input_shape=(3,), classes=2, hidden=(4, 4), T=5)
    inputs = spike_inputs(5, 6, (3,), seed=8, rate=0.7)
    labels = np.arange(6) % 2
    rows = vanishing_probe(model, inputs, labels, gammas=[0.5, 0.9])
    assert len(rows) == 2 * 2 * 5
    assert {r.gamma for r in rows} == {0.5, 0.9}
    for r in rows:
        if r.t == 5:
            assert r.grad_t == 0.0
    probe = model.with_lif(gamma=0.9)
    outputs, trace = probe.forward(inputs)
    parts = probe.temporal_grad_components(trace, sdt_ce_loss(outputs, labels).output_grad)
    layer1 = [r for r in rows if r.gamma == 0.9 and r.layer == 1]
    np.testing.assert_allclose([r.grad_p for r in layer1], parts.spatial_norms[1], rtol=1e-10, atol=0)
    np.testing.assert_allclose([r.grad_t for r in layer1], parts.temporal_norms[1], rtol=1e-10, atol=0)
    assert {r.gamma for r in vanishing_probe(model, inputs, labels)} == {model.spec.lif.gamma}


def test_vanishing_probe_logs_silent_decay(caplog):
    """Test each layer summary carries the gamma^(T-1) silent-neuron decay."""
    model = make_model(input_shape=(3,), classes=2, hidden=(4,), T=5)
    inputs = spike_inputs(5, 4, (3,), seed=2, rate=0.5)
    with caplog.at_level(logging.INFO, logger="trtsnn.diagnostics.vanishing"):
        vanishing_probe(model, inputs, np.arange(4) % 2, gammas=[0.5, 0.9])
    summaries = [m for m in caplog.messages if "silent-neuron decay" in m]
    assert len(summaries) == 2
    assert summaries[0].endswith("0.0625)")
    assert summaries[1].endswith("0.656)")


def test_vanishing_probe_errors():
    """Test one-step and readout-only networks are refused."""
    with pytest.raises(DiagnosticError):
        vanishing_probe(make_model(T=1), np.ones((1, 2, 3)), np.array([0, 1]))
    with pytest.raises(DiagnosticError):
        vanishing_probe(make_model(hidden=(), T=3), np.ones((3, 2, 3)), np.array([0, 1]))


def test_slower_leak_keeps_temporal_gradient():
    """Test gamma near 1 carries gradient further back than gamma = 0.5."""
    T = 30
    base = make_model(input_shape=(2,), classes=2, hidden=(3,), T=T, norm=False)
    params = base.params.copy()
    params.tensors["layer0.weight"][...] = 0.0
    params.tensors["layer0.bias"][...] = 0.01
    ratios = {}
    for gamma in (0.5, 0.95):
        model = base.with_params(params).with_lif(gamma=gamma, alpha=4.0)
        outputs, trace = model.forward(np.zeros((T, 2, 2)))
        assert not trace.layers[0].s.any()
        grad_outputs = np.zeros_like(outputs)
        grad_outputs[-1] = 0.1 * Rng(0).normal((2, 2))
        parts = model.temporal_grad_components(trace, grad_outputs)
        ratios[gamma] = parts.temporal_norms[0, 0] / parts.spatial_norms[0, -1]
    assert ratios[0.5] < 0.5 ** (T - 1)
    assert ratios[0.95] > ratios[0.5] * 1e6


def test_asfr_counts():
    """Test firing rates of hand-built spike traces."""
    zeros = np.zeros((2, 3, 4))
    half = np.zeros((2, 3, 4))
    half[0] = 1.0
    trace = ForwardTrace(
        layers=[
            LayerTrace(inputs=zeros, x=zeros, s=zeros),
            LayerTrace(inputs=zeros, x=zeros, s=np.ones((2, 3, 4))),
            LayerTrace(inputs=zeros, x=zeros, s=half),
            LayerTrace(inputs=zeros, x=np.zeros((2, 3, 2))),
        ],
        outputs=np.zeros((2, 3, 2)),
        training=False,
    )
    assert asfr(trace) == {0: 0.0, 1: 1.0, 2: 0.5}
    assert asfr(trace, [2]) == {2: 0.5}
    with pytest.raises(DiagnosticError):
        asfr(trace, [3])
    with pytest.raises(DiagnosticError):
        asfr(trace, [9])


def test_grid_offsets():
    """Test odd grids center on zero and even ones are refused."""
    np.testing.assert_array_equal(grid_offsets(1, 1.0), [0.0])
    np.testing.assert_array_equal(grid_offsets(5, 1.0), [-1.0, -0.5, 0.0, 0.5, 1.0])
    with pytest.raises(DiagnosticError):
        grid_offsets(4, 1.0)


def test_filter_normalized_direction(model):
    """Test every output unit of the direction matches its weight norm."""
    direction = filter_normalized_direction(model, Rng(3))
    assert set(direction) == set(model.weights())
    for name, d in direction.items():
        w = model.params.tensors[name]
        np.testing.assert_allclose(
            np.linalg.norm(d.reshape(d.shape[0], -1), axis=1),
            np.linalg.norm(w.reshape(w.shape[0], -1), axis=1),
            rtol=1e-8,
        )


def test_landscape_center_and_restoration(model, batch):
    """Test the center is the unperturbed loss and the model is untouched."""
    inputs, labels = batch

    def loss_fn(m):
        return sdt_ce_loss(m.forward(inputs)[0], labels).total

    before = model.params.copy()
    grid = landscape_2d(model, loss_fn, grid=(5, 3), span=0.5, seeds=(1, 2))
    assert grid.losses.shape == (5, 3)
    assert grid.center == loss_fn(model)
    for name, value in before.tensors.items():
        np.testing.assert_array_equal(model.params.tensors[name], value)
    again = landscape_2d(model, loss_fn, grid=(5, 3), span=0.5, seeds=(1, 2))
    np.testing.assert_array_equal(again.losses, grid.losses)

    d1 = filter_normalized_direction(model, Rng(1))
    zero = {k: np.zeros_like(v) for k, v in d1.items()}
    negated = {k: -v for k, v in d1.items()}
    forward = landscape_2d(model, loss_fn, grid=(5, 1), directions=(d1, zero))
    backward = landscape_2d(model, loss_fn, grid=(5, 1), directions=(negated, zero))
    np.testing.assert_array_equal(forward.losses[:, 0], backward.losses[::-1, 0])


def test_landscape_non_finite_sentinel(model):
    """Test non-finite losses are kept as NaN."""
    calls = []

    def loss_fn(m):
        calls.append(1)
        return float("inf") if len(calls) % 2 else 1.0

    grid = landscape_2d(model, loss_fn, grid=(3, 3))
    assert grid.losses.size == 9
    assert np.isnan(grid.losses).sum() == 5


def test_report_writers(tmp_path):
    """Test CSV schemas of the diagnostic writers."""
    model = _trained_like_model()
    profile = fisher_profile(model, spike_inputs(4, 2, (4,), rate=0.6), epoch=1)
    path = write_fisher_csv(tmp_path / "fisher.csv", [profile])
    with open(path, newline="") as fin:
        rows = list(csv.reader(fin))
    assert rows[0] == ["epoch", "t", "I_t", "IC"]
    assert [r[1] for r in rows[1:]] == ["1", "2", "3", "4"]
    assert float(rows[2][2]) == profile.traces[1]

    rows = vanishing_probe(model, spike_inputs(4, 2, (4,)), np.array([0, 2]))
    text = write_vanishing_csv(tmp_path / "tgrad.csv", rows).read_text()
    assert text.splitlines()[0] == "gamma,layer,t,grad_p,grad_t,vanished"
    assert len(text.splitlines()) == 1 + len(rows)

    grid = LandscapeGrid(seeds=(0, 1), a=np.array([0.0]), b=np.array([-1.0, 1.0]), losses=np.array([[0.5, np.nan]]))
    lines = write_landscape_csv(tmp_path / "landscape.csv", grid).read_text().splitlines()
    assert lines == ["a,b,loss", "0.0,-1.0,0.5", "0.0,1.0,nan"]
