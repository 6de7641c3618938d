"""Reproducible random streams and chunked Monte Carlo averaging.

Work is cut into fixed-size chunks and chunk ``i`` of stream ``s`` always
draws from the same generator, so results do not depend on how many worker
threads process the chunks. Partial results are merged in chunk order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError

__all__ = ["RandomSource", "mc_mean", "resolve_threads", "DEFAULT_CHUNK"]

DEFAULT_CHUNK = 4096
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomSource:
    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            val = getattr(self, name)
            if int(val) != val or not 0 <= val <= _U64:
                raise InvalidArgumentError(f"{name} must be an unsigned 64-bit integer")
            object.__setattr__(self, name, int(val))

    def generator(self, *path):
        """PCG64 generator for the sub-stream ``path`` of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *path))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream):
        return RandomSource(self.seed, stream)


def resolve_threads(threads=None):
    if threads is None:
        threads = os.environ.get("MBOOT_THREADS", 1)
    threads = int(threads)
    if threads < 1:
        raise InvalidArgumentError("threads must be positive")
    return threads


def _chunk_stats(args):
    f, rs, index, n = args
    vals = np.asarray(f(rs.generator(index), n), dtype=float)
    if vals.shape != (n,):
        raise InvalidArgumentError(f"sampler returned shape {vals.shape}, expected ({n},)")
    mean = float(np.mean(vals))
    return n, mean, float(np.sum((vals - mean) ** 2))


def mc_mean(draws, f, rs: RandomSource, threads=None, chunk=DEFAULT_CHUNK):
    """Monte Carlo mean of ``f`` and its standard error.

    ``f(generator, n)`` must return ``n`` independent draws of the quantity
    being averaged.
    """
    draws = int(draws)
    if draws < 2:
        raise InvalidArgumentError("need at least two draws")
    sizes = [chunk] * (draws // chunk)
    if draws % chunk:
        sizes.append(draws % chunk)
    tasks = [(f, rs, i, n) for i, n in enumerate(sizes)]
    threads = resolve_threads(threads)
    if threads == 1 or len(tasks) == 1:
        parts = [_chunk_stats(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_chunk_stats, tasks))

    # Chan et al. pairwise update, applied in chunk order.
    n_tot, mean, m2 = parts[0]
    for n, mu, q in parts[1:]:
        delta = mu - mean
        total = n_tot + n
        mean += delta * n / total
        m2 += q + delta * delta * n_tot * n / total
        n_tot = total
    var = m2 / (n_tot - 1)
    return mean, float(np.sqrt(var / n_tot))
