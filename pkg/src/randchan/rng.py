"""Deterministic splittable random streams.

Built on numpy's counter-based Philox-4x64 generator.  Every stream is
keyed by a splitmix64 hash of (seed, stream index), so work partitioned
by stream (one stream per matrix row, one per Monte-Carlo trial, ...)
reproduces bit-identical numbers regardless of execution order, thread
count, or platform.
"""

import numpy as np
from numpy.random import Generator, Philox

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 scramble of a 64-bit word."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, *words: int) -> int:
    """Derive a 64-bit subseed from a base seed and integer context words.

    This is the fixed mixing function used everywhere a run needs its own
    seed (per-row streams, per-trial streams, per-(n, repeat) sweep runs),
    so adding runs to a config never perturbs the others.
    """
    acc = splitmix64(int(seed) & _MASK64)
    for w in words:
        acc = splitmix64(acc ^ (int(w) & _MASK64))
    return acc


def stream_uniforms(seed: int, stream: int, count: int) -> np.ndarray:
    """`count` doubles in [0, 1) from the (seed, stream)-keyed Philox stream."""
    key = [mix_seed(seed, stream, 1), mix_seed(seed, stream, 2)]
    gen = Generator(Philox(key=key))
    return gen.random(int(count))
