"""Deterministic random-number streams.

All stochastic code in the package draws from Philox counter-based
generators keyed by (master_seed, stream_index).  Two runs with the same
key produce bit-identical streams on every platform, and independent
stream indices never collide, which is what makes experiment records
reproducible and embarrassingly parallel draws safe.
"""
from __future__ import annotations

import numpy as np

__all__ = ["stream", "substreams"]


def stream(master_seed: int, stream_index: int = 0) -> np.random.Generator:
    """Return the generator for stream ``stream_index`` of an experiment."""
    if master_seed < 0 or stream_index < 0:
        raise ValueError("seed and stream index must be non-negative")
    key = np.array([master_seed, stream_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def substreams(master_seed: int, n: int, offset: int = 0) -> list[np.random.Generator]:
    """Generators for streams offset..offset+n-1, one per independent job."""
    return [stream(master_seed, offset + i) for i in range(n)]
