"""Seeded counter-based random numbers.

Every random fixture in the package is drawn from :class:`CounterRNG`, whose
output is fully determined by ``(seed, stream)``:

* bits come from Philox4x64-10 (Salmon et al., Random123) with the 128-bit key
  ``seed + 2**64 * stream`` and a zero initial counter;
* a uniform double is ``(w >> 11) * 2**-53`` for each raw 64-bit word ``w``;
* standard normals use the Box-Muller transform on consecutive word pairs
  ``(u1, u2)`` with ``u1`` shifted by half an ulp into ``(0, 1]``:
  ``z0 = sqrt(-2 ln u1) cos(2 pi u2)``, ``z1 = sqrt(-2 ln u1) sin(2 pi u2)``;
* a standard complex normal is ``(z0 + 1j z1) / sqrt(2)``.

Numpy only supplies the Philox block function; the transforms are spelled out
here so other implementations can regenerate identical fixtures.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


class CounterRNG:
    """Deterministic stream of uniforms and normals keyed by ``(seed, stream)``."""

    def __init__(self, seed: int = 0, stream: int = 0):
        seed = int(seed)
        stream = int(stream)
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative")
        self.seed = seed & _MASK64
        self.stream = stream & _MASK64
        self._bits = np.random.Philox(key=self.seed + (self.stream << 64))

    def spawn(self, stream: int) -> "CounterRNG":
        """Independent generator with the same seed and a different stream id."""
        return CounterRNG(self.seed, stream)

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(int(n))

    def uniform(self, size=None) -> np.ndarray | float:
        shape = () if size is None else np.atleast_1d(size)
        n = int(np.prod(shape))
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_M53
        if size is None:
            return float(u[0])
        return u.reshape(tuple(shape))

    def normal(self, size=None) -> np.ndarray | float:
        shape = () if size is None else tuple(np.atleast_1d(size))
        n = int(np.prod(shape))
        m = (n + 1) // 2
        words = self.raw(2 * m) >> np.uint64(11)
        u1 = (words[0::2].astype(np.float64) + 0.5) * _TWO_M53
        u2 = words[1::2].astype(np.float64) * _TWO_M53
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * m)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        z = z[:n]
        if size is None:
            return float(z[0])
        return z.reshape(shape)

    def complex_normal(self, size) -> np.ndarray:
        shape = tuple(np.atleast_1d(size))
        z = self.normal((int(np.prod(shape)), 2))
        return ((z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)).reshape(shape)


def as_rng(seed) -> CounterRNG:
    """Accept an existing generator or an integer seed."""
    if isinstance(seed, CounterRNG):
        return seed
    if seed is None:
        seed = 0
    return CounterRNG(int(seed))
