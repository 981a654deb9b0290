"""Reproducible random streams.

A stream is a plain value ``(master_seed, substream_id)``; every draw
function starts from the beginning of the stream, so the same value always
yields the same numbers.  Uniforms come from the counter-based Philox
generator keyed by a hash of the stream identity, and normal variates are
produced from them with the Box-Muller transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    substream_id: int = 0
    path: tuple = ()

    def __post_init__(self):
        for v in (self.master_seed, self.substream_id, *self.path):
            if not 0 <= int(v) <= _MASK64:
                raise ValueError("stream identifiers must be unsigned 64-bit integers")

    def child(self, key):
        """Independent stream derived from this one (e.g. one per data block)."""
        return RngStream(self.master_seed, self.substream_id, self.path + (int(key),))

    def generator(self):
        entropy = [int(self.master_seed), int(self.substream_id), *map(int, self.path)]
        key = np.random.SeedSequence(entropy).generate_state(2, np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def uniform(stream, count):
    """First ``count`` uniforms on [0, 1) of ``stream``."""
    return stream.generator().random(int(count))


def gaussian(stream, count):
    """First ``count`` standard normal draws of ``stream`` (Box-Muller)."""
    count = int(count)
    pairs = (count + 1) // 2
    u = uniform(stream, 2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    z = np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))
    return z.ravel()[:count]


def permutation(stream, n):
    return np.argsort(uniform(stream, n), kind="stable")
