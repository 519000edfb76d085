"""Seed schedule for Monte Carlo sampling.

Every random draw comes from numpy's counter-based Philox4x64 generator.
A stream is addressed by ``(seed, *key)``: the key names the purpose and
the chunk index, e.g. ``stream(42, SAMPLE_STREAM, 3)`` is chunk 3 of a plain
sampling run. Chunks are the unit of parallel work, which is why counts do
not change with the worker count.
"""

import numpy as np

SAMPLE_STREAM = 0
ADAPTIVE_STREAM = 1

# Shots per chunk for plain sampling, batches per chunk for adaptive rounds
CHUNK_SHOTS = 4096
CHUNK_BATCHES = 64


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``; same inputs, same draws."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def chunk_sizes(total: int, chunk: int) -> list[int]:
    """Split ``total`` into consecutive chunks of at most ``chunk``."""
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])
