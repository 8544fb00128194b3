"""Deterministic RNG derivation: one user seed, independent per-task streams."""
from __future__ import annotations

import zlib

import numpy as np


def _as_key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"seed path entries must be nonnegative, got {part}")
        return int(part)
    raise TypeError(f"seed path entries must be int or str, got {type(part).__name__}")


def spawn_rng(seed: int, *path) -> np.random.Generator:
    """Generator for (seed, *path); distinct paths give independent streams.

    Uses numpy's counter-based SeedSequence spawning, so streams for
    different paths are statistically independent and reproducible
    across platforms and process boundaries.
    """
    key = tuple(_as_key(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def run_seed(seed: int, *path) -> int:
    """Stable integer label for the stream at (seed, *path), e.g. for CSV rows."""
    key = tuple(_as_key(p) for p in path)
    return int(np.random.SeedSequence(entropy=seed, spawn_key=key).generate_state(1)[0])
