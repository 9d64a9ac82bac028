"""Deterministic named random streams.

Every stochastic procedure in the library draws from a stream addressed by a
root seed plus a path of labels, e.g. ``stream(seed, "trial", 3, "register",
7)``. Streams with different paths are statistically independent and do not
depend on the order in which they are created, so parallel trials cannot
perturb each other's draws.
"""
from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "child_seed"]


def _path_words(path: tuple) -> list[int]:
    words: list[int] = []
    for part in path:
        if isinstance(part, (int, np.integer)):
            words.append(int(part) & 0xFFFFFFFF)
            words.append((int(part) >> 32) & 0xFFFFFFFF)
        elif isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            raise TypeError(f"stream path parts must be int or str, got {part!r}")
    return words


def stream(seed: int, *path) -> np.random.Generator:
    """Return the generator for the stream addressed by (seed, *path)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + _path_words(path)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def child_seed(seed: int, *path) -> int:
    """Derive a sub-seed for handing to a component that seeds itself."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + _path_words(path)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
