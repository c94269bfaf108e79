# -*- coding: utf-8 -*-
"""Seeded random generator.

``Rng`` is a single-owner wrapper around numpy's PCG64 bit generator
(permuted congruential generator, 128-bit state). PCG64 output for a given
seed is fixed by numpy's stream-compatibility policy, so draws are identical
across processes and platforms.
"""

from typing import Any, Dict, Sequence

import numpy as np


class Rng:
    """Deterministic PCG64 stream with exportable state."""

    algorithm = "PCG64"

    def __init__(self, seed: int = 0):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def normal(self, shape: Sequence[int]) -> np.ndarray:
        """Standard normal float64 draws."""
        return self._generator.standard_normal(size=tuple(shape))

    def uniform(self, shape: Sequence[int]) -> np.ndarray:
        """Uniform float64 draws on [0, 1)."""
        return self._generator.random(size=tuple(shape))

    def bernoulli(self, prob: np.ndarray) -> np.ndarray:
        """Elementwise Bernoulli(prob) as float64 {0, 1}."""
        prob = np.asarray(prob, dtype=np.float64)
        return (self._generator.random(size=prob.shape) < prob).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of ``range(n)``."""
        return self._generator.permutation(n)

    def integers(self, low: int, high: int, shape: Sequence[int] = ()) -> np.ndarray:
        """Integers in ``[low, high)``."""
        return self._generator.integers(low, high, size=tuple(shape))

    def spawn(self, offset: int) -> "Rng":
        """Independent stream derived from this seed (not from the position)."""
        return Rng((self.seed + 0x9E3779B97F4A7C15 * (offset + 1)) % 2**64)

    @property
    def state(self) -> Dict[str, Any]:
        """Bit-generator state with 128-bit integers rendered as strings."""
        raw = self._generator.bit_generator.state
        return {
            "seed": self.seed,
            "algorithm": raw["bit_generator"],
            "state": str(raw["state"]["state"]),
            "inc": str(raw["state"]["inc"]),
            "has_uint32": int(raw["has_uint32"]),
            "uinteger": int(raw["uinteger"]),
        }

    @state.setter
    def state(self, value: Dict[str, Any]) -> None:
        if value.get("algorithm") != self.algorithm:
            raise ValueError(f"cannot restore {value.get('algorithm')!r} state into {self.algorithm}")
        self.seed = int(value["seed"])
        self._generator.bit_generator.state = {
            "bit_generator": self.algorithm,
            "state": {"state": int(value["state"]), "inc": int(value["inc"])},
            "has_uint32": int(value["has_uint32"]),
            "uinteger": int(value["uinteger"]),
        }

    @classmethod
    def from_state(cls, value: Dict[str, Any]) -> "Rng":
        """Rebuild a generator positioned exactly where ``value`` was taken."""
        rng = cls(int(value["seed"]))
        rng.state = value
        return rng
