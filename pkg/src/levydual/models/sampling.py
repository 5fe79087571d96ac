"""Deterministic block sampling shared by all model backends.

Paths are generated in fixed-size blocks.  Block ``k`` of a run with seed
``s`` draws from a counter-based generator keyed by ``(s, k)``, so its
content depends on nothing else: not on the number of worker threads, not
on scheduling order, not on other blocks.  Results are concatenated in
block order, which makes every estimate bitwise reproducible for a given
``(seed, n)`` across any worker count.

The block size is even so antithetic pairs ``(2j, 2j+1)`` never straddle a
block boundary.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 1 << 15


def rng_for_block(seed: int, block_index: int) -> np.random.Generator:
    """Counter-based generator for one block; key = (seed, block index)."""
    key = np.array([seed, block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def run_blocks(n: int, seed: int, workers: int, draw_block) -> np.ndarray:
    """Assemble ``n`` rows from per-block draws, in block order.

    ``draw_block(rng, rows)`` must return an array with ``rows`` leading
    entries and must make its draws in a fixed sequence, since the rng
    stream is shared across the whole block.
    """
    if n < 1:
        raise ValueError("need at least one path")
    spans = [(k, min(BLOCK_SIZE, n - k * BLOCK_SIZE))
             for k in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]

    def one(span):
        k, rows = span
        return np.asarray(draw_block(rng_for_block(seed, k), rows))

    if workers <= 1:
        parts = [one(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, spans))
    return np.concatenate(parts, axis=0)


def maybe_mirrored_normals(rng: np.random.Generator, rows: int, dim: int,
                           antithetic: bool) -> np.ndarray:
    """Standard normals, with consecutive rows mirrored in pairs if requested.

    With an odd row count the final row is an unpaired fresh draw.
    """
    if not antithetic:
        return rng.standard_normal((rows, dim))
    half = (rows + 1) // 2
    Z = rng.standard_normal((half, dim))
    out = np.empty((2 * half, dim))
    out[0::2] = Z
    out[1::2] = -Z
    return out[:rows]
