# -*- coding: utf-8 -*-
"""TRT-SNN Objectives Tests."""

import math

import numpy as np
import pytest

from conftest import numeric_gradient
from trtsnn.objectives import LossConfig
from trtsnn.objectives import compute_loss
from trtsnn.objectives import decay_term
from trtsnn.objectives import l2_penalty
from trtsnn.objectives import mse
from trtsnn.objectives import one_hot
from trtsnn.objectives import sdt_ce_loss
from trtsnn.objectives import sdt_mse_loss
from trtsnn.objectives import softmax_ce
from trtsnn.objectives import tet_loss
from trtsnn.objectives import trt_loss
from trtsnn.objectives import trt_regularizer
from trtsnn.objectives import trt_regularizer_grad
from trtsnn.tensor import Rng
from trtsnn.utils.exception import NonFiniteError
from trtsnn.utils.exception import ShapeMismatchError


def _outputs(seed=0, shape=(4, 3, 5)):
    return Rng(seed).normal(shape)


def test_loss_config_aliases():
    """Test ``lambda`` is accepted by alias and defaults are sensible."""
    cfg = LossConfig.model_validate({"lambda": "2e-5", "kind": "TET"})
    assert cfg.lambda_ == 2e-5
    assert cfg.kind == "TET"
    assert LossConfig().eta == 0.05
    with pytest.raises(ValueError):
        LossConfig(kind="HINGE")
    with pytest.raises(ValueError):
        LossConfig(epsilon=0.0)


def test_softmax_ce():
    """Test symmetric logits, saturation and label checks."""
    loss, grad = softmax_ce(np.zeros((2, 2)), [0, 1])
    assert loss == pytest.approx(math.log(2.0), abs=1e-15)
    np.testing.assert_allclose(grad, [[-0.25, 0.25], [0.25, -0.25]])
    loss, _ = softmax_ce(np.array([[1000.0, 0.0]]), [0])
    assert loss < 1e-12
    with pytest.raises(ValueError):
        softmax_ce(np.zeros((1, 3)), [3])
    with pytest.raises(ShapeMismatchError):
        softmax_ce(np.zeros((2, 3)), [0])


def test_softmax_ce_and_mse_gradients():
    """Test analytic gradients against central differences."""
    logits = _outputs(1, (3, 3))
    labels = [2, 0, 1]
    _, grad = softmax_ce(logits, labels)
    np.testing.assert_allclose(grad, numeric_gradient(lambda: softmax_ce(logits, labels)[0], logits), rtol=1e-8, atol=1e-10)
    target = one_hot(np.array(labels), 3)
    _, grad = mse(logits, target)
    np.testing.assert_allclose(grad, numeric_gradient(lambda: mse(logits, target)[0], logits), rtol=1e-8, atol=1e-10)


def test_mse_example():
    """Test the two-class hand example."""
    loss, _ = mse(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]))
    assert loss == 1.0
    assert mse(np.eye(3), np.eye(3))[0] == 0.0


def test_sdt_losses():
    """Test time-averaged losses, their step-constant gradients and FD agreement."""
    step = _outputs(2, (3, 4))
    outputs = np.stack([step, step])
    labels = np.array([1, 0, 3])
    value = sdt_ce_loss(outputs, labels)
    assert value.total == pytest.approx(softmax_ce(step, labels)[0], abs=1e-12)
    np.testing.assert_array_equal(value.output_grad[0], value.output_grad[1])

    outputs = _outputs(3, (3, 2, 4))
    labels = np.array([2, 1])
    value = sdt_ce_loss(outputs, labels)
    fd = numeric_gradient(lambda: sdt_ce_loss(outputs, labels).total, outputs)
    np.testing.assert_allclose(value.output_grad, fd, rtol=1e-8, atol=1e-10)

    onehot = one_hot(labels, 4)
    value = sdt_mse_loss(outputs, onehot)
    assert value.coefficients == {"ce": 0.0, "mse": 1.0, "reg": 0.0}
    fd = numeric_gradient(lambda: sdt_mse_loss(outputs, onehot).total, outputs)
    np.testing.assert_allclose(value.output_grad, fd, rtol=1e-8, atol=1e-10)
    with pytest.raises(ShapeMismatchError):
        sdt_mse_loss(outputs, one_hot(labels, 3))


def test_sdt_below_per_step_ce():
    """Test CE of the averaged logits never exceeds the per-step CE mean."""
    for seed in range(10):
        outputs = 3.0 * _outputs(seed)
        labels = np.array([0, 4, 2])
        per_step = tet_loss(outputs, labels, LossConfig(kind="TET", mu=0.0))
        assert sdt_ce_loss(outputs, labels).total <= per_step.total + 1e-12


def test_tet_loss():
    """Test the mu endpoints and the hand-combined blend."""
    outputs = _outputs(4)
    labels = np.array([1, 2, 3])
    per_step_ce = np.mean([softmax_ce(outputs[t], labels)[0] for t in range(4)])
    assert tet_loss(outputs, labels, LossConfig(kind="TET", mu=0.0)).total == pytest.approx(per_step_ce, abs=1e-12)
    phi = np.full((4, 3, 5), 0.25)
    assert tet_loss(phi, labels, LossConfig(kind="TET", mu=1.0, phi=0.25)).total == 0.0
    half = tet_loss(outputs, labels, LossConfig(kind="TET", mu=0.5))
    per_step_mse = np.mean([mse(outputs[t], 0.0)[0] for t in range(4)])
    assert half.total == pytest.approx(0.5 * per_step_ce + 0.5 * per_step_mse, abs=1e-12)
    fd = numeric_gradient(lambda: tet_loss(outputs, labels, LossConfig(kind="TET", mu=0.5)).total, outputs)
    np.testing.assert_allclose(half.output_grad, fd, rtol=1e-8, atol=1e-10)


def test_regularizer_examples():
    """Test pure L2 at t=1, no decay at delta=0 and the scalar hand case."""
    rng = Rng(5)
    weights = {"a": rng.normal((3, 4)), "b": rng.normal((2,))}
    cfg = LossConfig(lambda_=1e-3, delta=0.5)
    assert decay_term(1, 0.5) == 0.0
    assert trt_regularizer(weights, 1, cfg) == l2_penalty(weights, 1e-3)
    flat = LossConfig(lambda_=1e-3, delta=0.0)
    for t in (1, 4, 9):
        assert trt_regularizer(weights, t, flat) == pytest.approx(l2_penalty(weights, 1e-3), rel=1e-15)
    scalar = LossConfig(lambda_=0.1, delta=math.log(2.0), epsilon=1e-300)
    assert trt_regularizer([np.array([1.0])], 2, scalar) == pytest.approx(0.05, rel=1e-12)
    with pytest.raises(ValueError):
        decay_term(0, 0.5)


def test_regularizer_gradient():
    """Test dr/dW at t=1, at W=0 and against finite differences over 1000 draws."""
    rng = Rng(6)
    w = rng.normal((4, 3))
    cfg = LossConfig(lambda_=0.01, delta=0.3, epsilon=1e-3)
    np.testing.assert_array_equal(trt_regularizer_grad([w], 1, cfg)[0], 2 * 0.01 * w)
    np.testing.assert_array_equal(trt_regularizer_grad({"z": np.zeros(3)}, 5, cfg)["z"], 0.0)
    for trial in range(1000):
        # |W| kept off the kink at 0 so the central difference stays smooth
        signs = np.where(rng.uniform((3,)) < 0.5, -1.0, 1.0)
        w = signs * (0.05 + np.abs(rng.normal((3,)))) * (0.5 + trial % 4)
        t = int(rng.integers(1, 13))
        cfg = LossConfig(
            lambda_=float(rng.uniform(()) * 1e-2 + 1e-6),
            delta=float(rng.uniform(()) * 0.8),
            epsilon=float(rng.uniform(()) * 1e-2 + 1e-6),
        )
        analytic = trt_regularizer_grad([w], t, cfg)[0]
        # r sums over elements, so each element is differenced on its own with a relative step
        fd = np.array(
            [
                numeric_gradient(lambda: trt_regularizer([cell], t, cfg), cell, h=1e-5 * abs(cell[0]))[0]
                for cell in np.split(w.copy(), 3)
            ]
        )
        np.testing.assert_allclose(analytic, fd, rtol=1e-8, atol=0)


def test_regularizer_decays_in_time():
    """Test r(t) and |dr/dW| shrink as t grows."""
    w = {"w": Rng(8).normal((20,))}
    cfg = LossConfig(lambda_=1e-2, delta=0.25)
    values = [trt_regularizer(w, t, cfg) for t in range(1, 40)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 0.05 * values[0]
    grads = [np.abs(trt_regularizer_grad(w, t, cfg)["w"]) for t in range(1, 40)]
    for a, b in zip(grads, grads[1:]):
        assert np.all(b <= a + 1e-18)


def test_trt_loss_equivalences():
    """Test TRT degenerates to TET and to per-step MSE."""
    outputs = _outputs(9)
    labels = np.array([0, 3, 1])
    onehot = one_hot(labels, 5)
    weights = {"layer0.weight": Rng(1).normal((5, 5))}
    trt = trt_loss(outputs, labels, onehot, weights, LossConfig(eta=0.0, lambda_=0.0))
    tet = tet_loss(outputs, labels, LossConfig(kind="TET", mu=0.0))
    assert trt.total == tet.total
    np.testing.assert_array_equal(trt.output_grad, tet.output_grad)
    np.testing.assert_array_equal(trt.weight_grads["layer0.weight"], 0.0)

    pure = trt_loss(outputs, labels, onehot, weights, LossConfig(eta=1.0, lambda_=0.0))
    assert pure.total == pytest.approx(np.mean([mse(outputs[t], onehot)[0] for t in range(4)]), abs=1e-12)


def test_trt_loss_without_decay_is_l2():
    """Test delta = 0 gives the time-constant L2 penalty and its 2*lambda*W gradient."""
    outputs = _outputs(11)
    labels = np.array([2, 0, 1])
    onehot = one_hot(labels, 5)
    weights = {"layer0.weight": Rng(4).normal((4, 5)), "layer1.weight": Rng(5).normal((5, 4))}
    flat = trt_loss(outputs, labels, onehot, weights, LossConfig(eta=0.1, lambda_=1e-3, delta=0.0))
    assert flat.components["reg"] == l2_penalty(weights, 1e-3)
    for name, w in weights.items():
        np.testing.assert_array_equal(flat.weight_grads[name], 2.0 * 1e-3 * w)
    barely = trt_loss(outputs, labels, onehot, weights, LossConfig(eta=0.1, lambda_=1e-3, delta=1e-300))
    assert flat.total == pytest.approx(barely.total, rel=1e-14)
    for name in weights:
        np.testing.assert_allclose(flat.weight_grads[name], barely.weight_grads[name], rtol=1e-14, atol=0)


def test_trt_loss_ledger_and_gradients():
    """Test the component bookkeeping, output gradients and regularizer gradients."""
    outputs = _outputs(10)
    labels = np.array([4, 4, 0])
    onehot = one_hot(labels, 5)
    weights = {"layer0.weight": Rng(2).normal((3, 3)), "layer1.weight": Rng(3).normal((5, 3))}
    cfg = LossConfig(eta=0.2, lambda_=1e-3, delta=0.25)
    value = trt_loss(outputs, labels, onehot, weights, cfg)
    c = value.components
    assert abs(value.total - (0.8 * c["ce"] + 0.2 * c["mse"] + c["reg"])) <= 1e-12
    expected_reg = np.mean([trt_regularizer(weights, t, cfg) for t in range(1, 5)])
    assert c["reg"] == pytest.approx(expected_reg, rel=1e-14)
    fd = numeric_gradient(lambda: trt_loss(outputs, labels, onehot, weights, cfg).total, outputs)
    np.testing.assert_allclose(value.output_grad, fd, rtol=1e-8, atol=1e-10)
    w = weights["layer1.weight"]
    fd = numeric_gradient(lambda: trt_loss(outputs, labels, onehot, weights, cfg).total, w)
    np.testing.assert_allclose(value.weight_grads["layer1.weight"], fd, rtol=1e-6, atol=1e-11)


def test_compute_loss_dispatch():
    """Test every kind routes to its loss and bad outputs are refused."""
    outputs = _outputs(11)
    labels = np.array([1, 2, 0])
    for kind in ("SDT_CE", "SDT_MSE", "TET", "TRT"):
        value = compute_loss(outputs, labels, {}, LossConfig(kind=kind))
        assert np.isfinite(value.total)
        assert value.output_grad.shape == outputs.shape
    assert compute_loss(outputs, labels, {}, LossConfig(kind="SDT_CE")).total == sdt_ce_loss(outputs, labels).total
    bad = outputs.copy()
    bad[0, 0, 0] = np.nan
    with pytest.raises(NonFiniteError):
        compute_loss(bad, labels, {}, LossConfig())
    with pytest.raises(ShapeMismatchError):
        compute_loss(outputs[0], labels, {}, LossConfig())
