# -*- coding: utf-8 -*-
"""TRT-SNN Tensor Core Tests."""

import multiprocessing
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from trtsnn.tensor import Rng
from trtsnn.tensor import as_tensor
from trtsnn.tensor import check_finite
from trtsnn.tensor import matmul
from trtsnn.tensor import reduce_mean
from trtsnn.tensor import seeded_normal
from trtsnn.utils.exception import NonFiniteError
from trtsnn.utils.exception import ShapeMismatchError


def test_matmul():
    """Test hand-checked products and extent checks."""
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(matmul(np.eye(2), a), a)
    np.testing.assert_array_equal(matmul(np.array([[1.0, 0.0]]), np.array([[0.0], [5.0]])), [[0.0]])
    np.testing.assert_array_equal(matmul(a, np.array([[5.0, 6.0], [7.0, 8.0]])), [[19.0, 22.0], [43.0, 50.0]])
    with pytest.raises(ShapeMismatchError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(ShapeMismatchError):
        matmul(np.ones(3), np.ones((3, 1)))


def test_matmul_associative():
    """Test (ab)c == a(bc) on random operands."""
    rng = Rng(3)
    a, b, c = rng.normal((4, 5)), rng.normal((5, 6)), rng.normal((6, 2))
    np.testing.assert_allclose(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), rtol=1e-9, atol=1e-12)


def test_reduce_mean():
    """Test averages, the constant case and errors."""
    np.testing.assert_array_equal(reduce_mean(np.array([[1.0, 3.0], [5.0, 7.0]]), 0), [3.0, 5.0])
    assert reduce_mean(np.full(3, 0.1), 0) == 0.1
    assert reduce_mean(np.array([2.5]), 0) == 2.5
    with pytest.raises(ShapeMismatchError):
        reduce_mean(np.ones((2, 2)), 2)
    with pytest.raises(ShapeMismatchError):
        reduce_mean(np.ones((0, 2)), 0)


def test_seeded_normal():
    """Test degenerate std, determinism and sample statistics."""
    np.testing.assert_array_equal(seeded_normal(Rng(0), (4,), mean=1.5, std=0.0), np.full(4, 1.5))
    np.testing.assert_array_equal(seeded_normal(Rng(5), (3, 3)), seeded_normal(Rng(5), (3, 3)))
    draws = seeded_normal(Rng(1), (100000,))
    assert abs(draws.mean()) < 0.02
    assert abs(draws.std() - 1.0) < 0.02
    with pytest.raises(ValueError, match="non-negative"):
        seeded_normal(Rng(0), (2,), std=-1.0)


def test_check_finite():
    """Test NaN/Inf are refused with a count."""
    with pytest.raises(NonFiniteError) as info:
        check_finite(np.array([1.0, np.nan, np.inf]), "activations")
    assert info.value.count == 2
    with pytest.raises(NonFiniteError):
        as_tensor([1.0, np.inf])


def test_rng_state_roundtrip():
    """Test a restored generator continues the same stream."""
    rng = Rng(11)
    rng.uniform((10,))
    saved = rng.state
    expected = rng.permutation(50)
    restored = Rng.from_state(saved)
    np.testing.assert_array_equal(restored.permutation(50), expected)


def test_rng_spawn_is_position_independent():
    """Test spawned streams depend on the seed only."""
    a = Rng(4)
    b = Rng(4)
    b.normal((100,))
    np.testing.assert_array_equal(a.spawn(2).normal((5,)), b.spawn(2).normal((5,)))
    assert not np.array_equal(a.spawn(1).normal((5,)), a.spawn(2).normal((5,)))


def _stream_bytes(seed):
    """Draws from every sampler of ``Rng(seed)``, concatenated as raw bytes."""
    rng = Rng(seed)
    parts = [
        rng.normal((64,)),
        rng.uniform((32,)),
        rng.bernoulli(np.full(16, 0.3)),
        rng.permutation(20),
        rng.integers(0, 1000, (8,)),
        rng.spawn(3).normal((4,)),
    ]
    return b"".join(np.ascontiguousarray(p).tobytes() for p in parts)


def test_rng_streams_match_across_processes():
    """Test fresh interpreters and every start method reproduce the parent's bytes."""
    expected = _stream_bytes(2024)
    root = Path(__file__).resolve().parents[1]
    script = (
        "import sys\n"
        f"sys.path.insert(0, {str(root / 'tests')!r})\n"
        "from tensor_core_test import _stream_bytes\n"
        "sys.stdout.write(_stream_bytes(2024).hex())\n"
    )
    child = subprocess.run(
        [sys.executable, "-c", script], cwd=str(root), capture_output=True, text=True, check=True
    )
    assert bytes.fromhex(child.stdout) == expected
    for method in multiprocessing.get_all_start_methods():
        with multiprocessing.get_context(method).Pool(1) as pool:
            assert pool.apply(_stream_bytes, (2024,)) == expected, method
