"""Deterministic counter-based random streams keyed by (seed, stream).

Philox streams make every sample a pure function of its key, so work can be
split across any number of workers without changing the multiset of draws.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_generator(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
