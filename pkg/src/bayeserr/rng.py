"""Deterministic random streams.

Every randomized routine in the package takes an explicit integer seed and
derives independent child streams from it by hashing, never by sharing
generator state. The generator is Philox (counter-based), so a given
(seed, draw order) pair yields the same values on every platform and for any
partitioning of the work.

Child derivation: ``child(root, i) = mix(mix(root) ^ mix(i + GAMMA))`` where
``mix`` is the SplitMix64 finalizer. Both arguments are reduced modulo 2**64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# Largest chunk the binomial inversion sampler draws at once: keeps the
# starting pmf (1-p)^m >= 2**-1000 away from underflow for p <= 1/2.
_BINOMIAL_CHUNK = 1000


def _mix(x: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit hash."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def child_seed(root: int, index: int) -> int:
    """Derive the seed of child stream `index` from `root`."""
    if index < 0:
        raise DomainError(f"child stream index must be >= 0, got {index}")
    return _mix(_mix(root) ^ _mix(index + _GAMMA))


def generator(seed: int) -> np.random.Generator:
    """Counter-based generator for one stream."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


@dataclass(frozen=True)
class Seed:
    """A root seed plus the child-derivation convention.

    ``Seed(s).child(i)`` is the i-th independent stream; ``.generator()``
    instantiates the stream itself.
    """

    root: int

    def child(self, index: int) -> "Seed":
        return Seed(child_seed(self.root, index))

    def generator(self) -> np.random.Generator:
        return generator(self.root)


def as_seed(seed: "int | Seed") -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, (int, np.integer)):
        return Seed(int(seed))
    raise DomainError(f"seed must be an int or Seed, got {type(seed).__name__}")


def bernoulli(gen: np.random.Generator, p: np.ndarray) -> np.ndarray:
    """One Bernoulli draw per entry of `p`, as 0/1 integers."""
    p = np.asarray(p, dtype=float)
    return (gen.random(p.shape) < p).astype(np.int64)


def binomial(gen: np.random.Generator, m: int, p: np.ndarray) -> np.ndarray:
    """Vector of Binomial(m, p_i) draws using only uniform variates.

    Small m sums m Bernoulli draws; larger m uses CDF inversion with the
    pmf recursion, reflected to the lower tail so the recursion start never
    underflows, in chunks of at most 1000 trials. All paths consume the
    generator in a fixed documented order, so results are reproducible
    independent of platform.
    """
    if m < 1:
        raise DomainError(f"binomial needs m >= 1, got {m}")
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise DomainError("binomial expects a 1-d probability array")
    if p.size and (np.min(p) < 0.0 or np.max(p) > 1.0):
        raise DomainError("binomial probabilities must lie in [0, 1]")
    if m <= 64:
        return (gen.random((p.size, m)) < p[:, None]).sum(axis=1).astype(np.int64)
    total = np.zeros(p.size, dtype=np.int64)
    remaining = m
    while remaining > 0:
        chunk = min(remaining, _BINOMIAL_CHUNK)
        total += _binomial_by_inversion(gen, chunk, p)
        remaining -= chunk
    return total


def _binomial_by_inversion(gen: np.random.Generator, m: int, p: np.ndarray) -> np.ndarray:
    flip = p > 0.5
    q = np.where(flip, 1.0 - p, p)  # q <= 1/2 so (1-q)^m >= 2^-m stays normal
    u = gen.random(p.size)
    ratio = q / (1.0 - q)
    pmf = (1.0 - q) ** m
    cdf = pmf.copy()
    k = np.zeros(p.size, dtype=np.int64)
    pending = u > cdf
    j = 0
    while pending.any() and j < m:
        pmf = pmf * ratio * (m - j) / (j + 1.0)
        cdf = cdf + pmf
        k[pending] += 1
        pending = pending & (u > cdf)
        j += 1
    return np.where(flip, m - k, k)
