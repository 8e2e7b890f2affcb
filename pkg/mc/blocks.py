"""
Block runner shared by every Monte Carlo estimate

fn(rng, size) is called once per block with that block's own stream. Lanes
are worker threads; results always come back in block order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

from tqdm import tqdm

from common.streams import block_rng, iter_blocks

logger = logging.getLogger("mdtk.mc")


def run_blocks(fn: Callable, reps: int, seed: int, block_size: int, lanes: int = 1,
               first_block: int = 0, progress: bool = False, desc: str = "blocks") -> List:
    blocks = list(iter_blocks(reps, block_size, first_block))

    def one(item):
        key, size = item
        return fn(block_rng(seed, key), size)

    logger.debug(f"{desc}: {len(blocks)} blocks of <= {block_size} reps on {lanes} lane(s)")
    with tqdm(total=int(reps), unit="reps", desc=desc, disable=not progress) as bar:
        results = []
        if lanes <= 1:
            for item in blocks:
                results.append(one(item))
                bar.update(item[1])
        else:
            with ThreadPoolExecutor(max_workers=lanes) as executor:
                # map keeps submission order
                for item, result in zip(blocks, executor.map(one, blocks)):
                    results.append(result)
                    bar.update(item[1])
    return results
