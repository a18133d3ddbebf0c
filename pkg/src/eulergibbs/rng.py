"""Reproducible random streams.

A single integer seed expands into independent streams indexed by
``(seed, domain, index)`` through :class:`numpy.random.SeedSequence` spawn
keys.  Python-level streams use the counter-based Philox bit generator;
compiled kernels receive a 32-bit seed per chunk derived the same way, so the
output of a batch depends only on the seed and the chunk index, never on how
chunks were scheduled across threads.
"""

from __future__ import annotations

import numbers
import os

import numpy as np

#: samples per compiled-kernel chunk; part of the reproducibility contract
CHUNK_SIZE = 8192

_PY_DOMAIN = 0
_KERNEL_DOMAIN = 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_PY_DOMAIN, int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(random_state=None) -> np.random.Generator:
    """Coerce ``None``, an int or a Generator into a Generator."""
    if random_state is None:
        return np.random.Generator(np.random.Philox())
    if isinstance(random_state, np.random.Generator):
        return random_state
    if isinstance(random_state, numbers.Integral):
        return make_rng(int(random_state))
    raise TypeError(f"cannot use {random_state!r} as a random state")


def base_seed(random_state=None) -> int:
    """Integer seed for batch work: ints pass through, Generators are drawn from."""
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        return int(random_state)
    return int(as_generator(random_state).integers(2**63))


def kernel_seed(seed: int, chunk: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(_KERNEL_DOMAIN, int(chunk)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def chunks(n_samples: int, chunk_size: int = CHUNK_SIZE):
    """Yield ``(chunk_index, start, stop)`` covering ``range(n_samples)``."""
    for c, start in enumerate(range(0, n_samples, chunk_size)):
        yield c, start, min(start + chunk_size, n_samples)


def n_threads(requested: int | None = None) -> int:
    """Worker count, capped by the ``EULER_THREADS`` environment variable."""
    cap = os.environ.get("EULER_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)
