"""Seeded hit-or-miss Monte Carlo integration over a bounding box."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, NegativeWeightError

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    n: int
    seed: int


def default_threads() -> int:
    env = os.environ.get("WMI_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _block_rng(seed: int, stream: Sequence[int], block: int) -> np.random.Generator:
    # counter-based generator keyed per block: any shard can regenerate any
    # block independently, so sharding never changes the sample stream
    ss = np.random.SeedSequence([seed, *stream, block])
    return np.random.Generator(np.random.Philox(ss))


def sample_block(bounds, seed: int, stream: Sequence[int], block: int, size: int) -> np.ndarray:
    lo = np.array([float(a) for a, _ in bounds])
    hi = np.array([float(b) for _, b in bounds])
    U = _block_rng(seed, stream, block).random((size, len(bounds)))
    return lo + (hi - lo) * U


def mc_integrate(member: Callable[[np.ndarray], np.ndarray],
                 density: Callable[[np.ndarray], np.ndarray] | None,
                 bounds: Sequence[tuple], n: int, seed: int, *,
                 stream: Sequence[int] = (), threads: int | None = None,
                 block_size: int = BLOCK_SIZE) -> McEstimate:
    """Estimate ``int_box 1[member] * density`` from ``n`` uniform samples.

    Parameters
    ----------
    member, density
        Vectorised callables taking an ``(k, N)`` array of points.  ``density``
        may be ``None`` for the constant 1.
    bounds
        Per-axis ``(lower, upper)`` of the box.
    n, seed
        Sample count and seed.  ``stream`` is an optional tuple of extra
        non-negative integers mixed into the seed so independent integrals can
        share one user seed.
    threads
        Worker count; the result is bit-identical for every value.

    Samples are drawn in fixed blocks, each from its own counter-based
    generator; shard ``k`` of ``S`` handles blocks ``j = k mod S`` and the
    per-block sums are reduced in block order.
    """
    if n < 2:
        raise InputError("Monte Carlo needs at least 2 samples")
    vol = 1.0
    for lo, hi in bounds:
        vol *= float(Fraction(hi) - Fraction(lo))
    nblocks = -(-n // block_size)
    sizes = [min(block_size, n - j * block_size) for j in range(nblocks)]

    def run(j: int):
        X = sample_block(bounds, seed, stream, j, sizes[j])
        hit = np.asarray(member(X), dtype=bool)
        vals = np.zeros(sizes[j])
        if hit.any():
            d = np.ones(int(hit.sum())) if density is None else np.asarray(density(X[hit]), float)
            if (d < 0).any():
                bad = X[hit][np.argmax(d < 0)]
                raise NegativeWeightError(f"density is negative at sampled point {bad.tolist()}")
            vals[hit] = d
        s = float(np.sum(vals))
        m = s / sizes[j]
        return s, m, float(np.sum((vals - m) ** 2)), sizes[j]

    shards = min(threads or default_threads(), nblocks)

    def run_shard(k: int):
        return {j: run(j) for j in range(k, nblocks, shards)}

    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            merged = {}
            for part in pool.map(run_shard, range(shards)):
                merged.update(part)
    else:
        merged = run_shard(0)
    parts = [merged[j] for j in range(nblocks)]

    mean = math.fsum(p[0] for p in parts) / n
    m2 = math.fsum(p[2] for p in parts) + math.fsum(p[3] * (p[1] - mean) ** 2 for p in parts)
    std = math.sqrt(max(m2, 0.0) / (n - 1))
    return McEstimate(vol * mean, vol * std / math.sqrt(n), n, seed)
