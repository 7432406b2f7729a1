"""Seeded random streams for the two-step experiment.

Step one draws ``T`` uniformly from the ``n**n`` mappings of ``[n]``; step
two draws a vertex (or an unordered pair of distinct vertices) uniformly and
independently of ``T``.

Every stream is a Philox-4x64 counter-based generator keyed by the pair
``(seed, stream_id)`` through :class:`numpy.random.SeedSequence`, so a
stream's output depends on nothing but those two integers and the number of
draws taken so far.  Bounded integers come from numpy's unbiased
``Generator.integers`` (Lemire's multiply-and-reject), which has no modulo bias.
"""
from __future__ import annotations

import numpy as np

from .fungraph import Mapping

__all__ = [
    "GENERATOR_ID",
    "InvalidSize",
    "RandomStream",
    "sample_mapping",
    "sample_vertex",
    "sample_vertex_pair",
]

GENERATOR_ID = f"numpy-{np.__version__}/Philox4x64-10/SeedSequence(seed, spawn_key=(stream_id, *chunk_path))/integers-lemire"

_MASK64 = (1 << 64) - 1


class InvalidSize(ValueError):
    pass


class RandomStream:
    """Reproducible draw sequence identified by ``(seed, stream_id)``.

    ``position`` counts the draws (mappings, vertices or pairs) taken so far.
    Streams are not shared between workers; build one per chunk instead.
    """

    def __init__(self, seed: int, stream_id: int = 0, _path: tuple[int, ...] = ()):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.path = tuple(int(k) & _MASK64 for k in _path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        self._gen = np.random.Generator(np.random.Philox(ss))
        self.position = 0

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path}, position={self.position})"

    def child(self, k: int) -> "RandomStream":
        """Independent sub-stream number `k`, e.g. for one chunk of trials."""
        return RandomStream(self.seed, self.stream_id, self.path + (k,))

    def metadata(self) -> dict:
        return {"generator": GENERATOR_ID, "seed": self.seed, "stream_id": self.stream_id}

    def integers(self, low: int, high: int, size=None):
        """Uniform integers on ``[low, high)``."""
        self.position += 1
        return self._gen.integers(low, high, size=size, dtype=np.int64)


def sample_mapping(n: int, rs: RandomStream) -> Mapping:
    """Draw a mapping on [n] with probability ``n**-n`` each."""
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    images = rs.integers(1, n + 1, size=n)
    images.setflags(write=False)
    return Mapping(images)


def sample_vertex(n: int, rs: RandomStream) -> int:
    if n < 1:
        raise InvalidSize(f"n must be at least 1, got {n}")
    return int(rs.integers(1, n + 1))


def sample_vertex_pair(n: int, rs: RandomStream) -> tuple[int, int]:
    """Uniform unordered pair ``(u, v)`` with ``u < v``.

    The second vertex is drawn from the ``n - 1`` labels left after the first,
    which makes every ordered pair of distinct vertices equally likely.
    """
    if n < 2:
        raise InvalidSize(f"a vertex pair needs n >= 2, got {n}")
    u, w = rs.integers(1, np.array([n + 1, n]))
    u, w = int(u), int(w)
    if w >= u:
        w += 1
    return (u, w) if u < w else (w, u)
