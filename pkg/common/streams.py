"""
Random streams for Monte Carlo blocks

Reps are cut into fixed-size blocks. Block b draws from
Generator(Philox(SeedSequence(seed, spawn_key=(b,)))), so any block can be
regenerated from (seed, b) alone and the lane count never changes results.
"""

from typing import Iterator

import numpy as np

RNG_ID = f"numpy-{np.__version__}/Philox4x64/SeedSequence-spawn_key"


def block_rng(seed: int, block: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(seq))


def block_sizes(reps: int, block_size: int) -> list:
    """Sizes of the blocks covering reps; only the last one may be short"""
    full, rest = divmod(int(reps), int(block_size))
    return [int(block_size)] * full + ([rest] if rest else [])


def iter_blocks(reps: int, block_size: int, first_block: int = 0) -> Iterator[tuple]:
    """Yield (block_key, size)"""
    for offset, size in enumerate(block_sizes(reps, block_size)):
        yield first_block + offset, size
