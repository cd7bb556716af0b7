"""Seed-deterministic Monte Carlo engine.

Trials are cut into fixed-size blocks. Block ``b`` draws from a Philox stream
whose key comes from the master seed and whose counter starts at block index
``b``, so every trial's randomness depends only on (seed, trial index) and
never on how blocks are scheduled across worker threads.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

TRIAL_BLOCK = 128

Kernel = Callable[[np.random.Generator, int], np.ndarray]


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    counter = np.array([0, 0, block_index, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def block_sizes(trials: int, block: int = TRIAL_BLOCK) -> list[int]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    full, rest = divmod(trials, block)
    return [block] * full + ([rest] if rest else [])


def run_trials(
    kernel: Kernel,
    trials: int,
    seed: int,
    workers: int = 1,
    block: int = TRIAL_BLOCK,
) -> np.ndarray:
    """Sum of ``kernel(rng, count)`` over all blocks.

    The kernel returns integer counts (any fixed shape); integer summation
    makes the result independent of the worker count.
    """
    sizes = block_sizes(trials, block)

    def _run(index: int) -> np.ndarray:
        return np.asarray(kernel(block_generator(seed, index), sizes[index]), dtype=np.int64)

    logger.debug("monte carlo: trials=%d blocks=%d workers=%d", trials, len(sizes), workers)
    if workers <= 1:
        partials = [_run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_run, range(len(sizes))))
    total = partials[0].copy()
    for part in partials[1:]:
        total += part
    return total
