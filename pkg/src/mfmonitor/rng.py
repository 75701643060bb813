"""Seeded, splittable random streams.

The randomisation sequence ``z_tau`` is produced by the inverse-CDF method
from raw 64-bit PCG64 output, so a stream drawn one value at a time and the
same stream drawn in bulk are bit-identical.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import ndtri

_SCALE = 2.0 ** -53


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for ``(master_seed, *key)``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class GaussianStream:
    """i.i.d. standard normal draws via ``ndtri`` of 53-bit uniforms.

    Parameters
    ----------
    seed : int
        64-bit seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._bitgen = np.random.PCG64(self.seed)

    def draw(self, n: int) -> np.ndarray:
        raw = self._bitgen.random_raw(n)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE
        return ndtri(u)

    def next(self) -> float:
        return float(self.draw(1)[0])

    @property
    def state(self) -> dict:
        return self._bitgen.state

    @state.setter
    def state(self, value: dict) -> None:
        self._bitgen.state = value


def seeds_for(master_seed: int, n: int, *key: int) -> Sequence[int]:
    return [derive_seed(master_seed, *key, i) for i in range(n)]
