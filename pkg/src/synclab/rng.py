"""Seeded substreams and Box-Muller Gaussians.

Every random quantity in the package is drawn from a Philox generator whose
key is a 64-bit hash of ``(seed, tag, index)``.  Tags name the purpose of the
draw (signal, noise channel, external channel, ...) and are disjoint, so two
purposes never share a stream.  The index is usually a trial or chunk number.

Gaussians are produced by the Box-Muller transform from Philox uniforms so
that the algorithm is fixed independently of numpy's default normal sampler.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# purpose tags; channel-specific tags add the channel number (< 0x100)
TAG_SIGNAL = 0x100
TAG_NOISE = 0x200
TAG_EXTERNAL = 0x300
TAG_START_VECTOR = 0x400
TAG_ADV = 0x500
TAG_ADV_REPLICA = 0x600
TAG_INTERP = 0x700
TAG_HIDDEN_INDEX = 0x800

# experiment arms occupy the high 32 bits of the tag
ARM_PLANTED = 1
ARM_NULL = 2
ARM_ALT_NULL = 3


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def substream_id(seed: int, tag: int, index: int = 0) -> int:
    h = splitmix64(index & MASK64)
    h = splitmix64((tag & MASK64) ^ h)
    return splitmix64((seed & MASK64) ^ h)


def substream(seed: int, tag: int, index: int = 0, arm: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, purpose, index) triple."""
    key = substream_id(seed, tag | (arm << 32), index)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    shape = (size,) if np.isscalar(size) else tuple(size)
    count = int(np.prod(shape, dtype=np.int64))
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1], keeps the log finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(shape)


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Complex standard Gaussians: real and imaginary parts i.i.d. N(0, 1/2)."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    u1 = 1.0 - rng.random(shape)
    u2 = rng.random(shape)
    r = np.sqrt(-np.log(u1))
    angle = 2 * np.pi * u2
    out = np.empty(shape, dtype=complex)
    out.real = r * np.cos(angle)
    out.imag = r * np.sin(angle)
    return out
