"""Counter-based sample streams.

Every logical sample is addressed by ``(master_seed, purpose, stream_id)``
and drawn from a Philox4x64 generator whose counter is positioned at a
fixed offset for that stream id.  A sample therefore never depends on how
many other samples were drawn before it, on evaluation order, or on the
number of workers.  Contiguous ranges of stream ids are generated in one
vectorised call and are bit-identical to generating each id on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_BLOCK = 4  # Philox4x64 emits four 64-bit words per counter step
_INV_2_53 = 1.0 / (1 << 53)


class Purpose(IntEnum):
    """Independent key spaces so different consumers never share draws."""

    DIRECTION = 0
    BALL = 1
    XI = 2
    NOISE = 3
    DOMAIN = 4
    DATA = 5


@dataclass(frozen=True)
class SampleStream:
    master_seed: int
    stream_id: int = 0
    purpose: Purpose = Purpose.DIRECTION

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream_id <= _MASK64:
            raise ValueError("stream_id must be a 64-bit unsigned integer")

    def shifted(self, offset: int) -> "SampleStream":
        return SampleStream(self.master_seed, self.stream_id + offset, self.purpose)


def _raw_words(master_seed: int, purpose: int, start: int, count: int, words: int) -> np.ndarray:
    """Raw uint64 words, shape (count, words), for stream ids start..start+count-1."""
    blocks = -(-words // _WORDS_PER_BLOCK)
    key = (int(purpose) << 64) | (int(master_seed) & _MASK64)
    gen = np.random.Philox(counter=int(start) * blocks, key=key)
    raw = gen.random_raw(count * blocks * _WORDS_PER_BLOCK)
    return raw.reshape(count, blocks * _WORDS_PER_BLOCK)[:, :words]


def _to_unit_open_closed(w: np.ndarray) -> np.ndarray:
    """Map uint64 words to (0, 1]."""
    return ((w >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_2_53


def _to_unit_closed_open(w: np.ndarray) -> np.ndarray:
    """Map uint64 words to [0, 1)."""
    return (w >> np.uint64(11)).astype(np.float64) * _INV_2_53


def uniforms(master_seed: int, purpose: int, start: int, count: int, k: int = 1) -> np.ndarray:
    """Uniform [0, 1) draws, shape (count, k)."""
    return _to_unit_closed_open(_raw_words(master_seed, purpose, start, count, k))


def _gaussians_and_extra(d: int, master_seed: int, purpose: int, start: int, count: int):
    pairs = -(-d // 2)
    w = _raw_words(master_seed, purpose, start, count, 2 * pairs + 1)
    u1 = _to_unit_open_closed(w[:, 0 : 2 * pairs : 2])
    u2 = _to_unit_closed_open(w[:, 1 : 2 * pairs : 2])
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty((count, 2 * pairs))
    z[:, 0::2] = radius * np.cos(angle)
    z[:, 1::2] = radius * np.sin(angle)
    extra = _to_unit_closed_open(w[:, 2 * pairs])
    return z[:, :d], extra


def gaussian_block(d: int, master_seed: int, start: int, count: int,
                   purpose: int = Purpose.DIRECTION) -> np.ndarray:
    """Standard normal vectors (Box-Muller), shape (count, d)."""
    _check_dim(d)
    z, _ = _gaussians_and_extra(d, master_seed, purpose, start, count)
    return z


def sphere_block(d: int, master_seed: int, start: int, count: int,
                 purpose: int = Purpose.DIRECTION) -> np.ndarray:
    """Uniform directions on the Euclidean unit sphere, shape (count, d)."""
    _check_dim(d)
    z, _ = _gaussians_and_extra(d, master_seed, purpose, start, count)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    # a Box-Muller radius is never zero since u1 > 0, so norms > 0
    return z / norms


def ball_block(d: int, master_seed: int, start: int, count: int,
               purpose: int = Purpose.BALL) -> np.ndarray:
    """Uniform points in the Euclidean unit ball, shape (count, d)."""
    _check_dim(d)
    z, extra = _gaussians_and_extra(d, master_seed, purpose, start, count)
    e = z / np.linalg.norm(z, axis=1, keepdims=True)
    return e * (extra ** (1.0 / d))[:, None]


def sample_unit_sphere(d: int, stream: SampleStream) -> np.ndarray:
    return sphere_block(d, stream.master_seed, stream.stream_id, 1, stream.purpose)[0]


def sample_unit_ball(d: int, stream: SampleStream) -> np.ndarray:
    purpose = stream.purpose if stream.purpose != Purpose.DIRECTION else Purpose.BALL
    return ball_block(d, stream.master_seed, stream.stream_id, 1, purpose)[0]


def integers_block(high: int, master_seed: int, start: int, count: int, k: int,
                   purpose: int = Purpose.XI) -> np.ndarray:
    """Integers uniform on {0, ..., high-1}, shape (count, k).

    Multiply-shift on the top 32 bits of each word; the bias is at most
    high / 2**32.
    """
    if high < 1:
        raise ValueError("high must be positive")
    w = _raw_words(master_seed, purpose, start, count, k)
    top = (w >> np.uint64(32)).astype(np.float64)
    return np.minimum((top * high / 4294967296.0).astype(np.int64), high - 1)


class StreamCursor:
    """Hands out contiguous, never-overlapping stream id ranges.

    Solvers are sequential, so a simple running offset keeps every sample
    address a deterministic function of the run's history.
    """

    def __init__(self, master_seed: int, start: int = 0):
        self.master_seed = int(master_seed)
        self.position = int(start)

    def take(self, count: int) -> int:
        if count < 1:
            raise ValueError("count must be at least 1")
        start = self.position
        self.position += int(count)
        return start


def _check_dim(d: int) -> None:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
