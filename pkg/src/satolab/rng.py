"""Splittable counter-based random number generation.

Every variate is a pure function of (key, counter), so any position in any
stream can be addressed directly without generating its predecessors.  The
ensemble sampler keys one stream per member and uses the prime-ideal position
as the counter, which makes runs reproducible under any batching or thread
layout.  The mixer is the splitmix64 finalizer, whose output stream passes
standard statistical batteries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_ROOT_SALT = np.uint64(0x5851F42D4C957F2D)
_U53_SCALE = float(2.0**-53)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer; avalanches all 64 bits of z."""
    with np.errstate(over="ignore"):
        z = z.astype(np.uint64, copy=True)
        z ^= z >> np.uint64(30)
        z *= _MIX_A
        z ^= z >> np.uint64(27)
        z *= _MIX_B
        z ^= z >> np.uint64(31)
    return z


def _derive(key: np.ndarray, index: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _mix64(key + _GOLDEN * (index.astype(np.uint64) + np.uint64(1)))


def root_key(seed: int) -> np.uint64:
    """Top-level key for a run; all streams descend from it."""
    if not isinstance(seed, (int, np.integer)):
        raise ValueError("seed must be an integer")
    z = np.asarray(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF) ^ _ROOT_SALT)
    return np.uint64(_mix64(z)[()])


def member_keys(seed: int, member_indices: np.ndarray) -> np.ndarray:
    """One derived key per ensemble member index."""
    idx = np.asarray(member_indices, dtype=np.uint64)
    return _derive(np.asarray(root_key(seed)), idx)


def uniforms_at(keys: np.ndarray, counter: int) -> np.ndarray:
    """Uniform [0, 1) variate at a fixed counter position for each key."""
    bits = _derive(np.asarray(keys), np.asarray(np.uint64(counter)))
    return (bits >> np.uint64(11)).astype(np.float64) * _U53_SCALE


def uniform_matrix(keys: np.ndarray, count: int) -> np.ndarray:
    """Uniforms at counters 0..count-1 for each key, shape (len(keys), count).

    Row i equals CounterRng(keys[i]).uniforms(count): each entry depends only
    on its own (key, counter) pair, so the matrix is independent of how rows
    are batched across blocks or threads.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    keys = np.asarray(keys, dtype=np.uint64)
    idx = np.arange(count, dtype=np.uint64)
    bits = _derive(keys[:, None], idx[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * _U53_SCALE


@dataclass
class CounterRng:
    """Sequential view of one stream: draw n uniforms, advance the counter."""

    key: np.uint64
    counter: int = 0

    @classmethod
    def from_seed(cls, seed: int) -> "CounterRng":
        return cls(key=root_key(seed))

    def derive(self, index: int) -> "CounterRng":
        """Child stream; independent of this stream and of siblings."""
        child = _derive(np.asarray(self.key), np.asarray(np.uint64(index)))
        return CounterRng(key=np.uint64(child[()]))

    def uniforms(self, size: int) -> np.ndarray:
        """Next `size` uniforms in [0, 1); consumes exactly `size` positions."""
        if size < 0:
            raise ValueError("size must be nonnegative")
        idx = np.arange(self.counter, self.counter + size, dtype=np.uint64)
        out = (_derive(np.asarray(self.key), idx) >> np.uint64(11)).astype(
            np.float64
        ) * _U53_SCALE
        self.counter += size
        return out
