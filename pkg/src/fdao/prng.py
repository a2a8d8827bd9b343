"""MT19937 uniform source with polar Box-Muller and inverse-CDF Cauchy variates.

The generator is the 32-bit Mersenne Twister with the 2002 ``init_by_array``
initializer. A 64-bit seed is split into little-endian 32-bit words and fed
through ``init_by_array`` (the same convention CPython's ``random`` uses), so
``MT19937(s).next_u32()`` reproduces ``random.Random(s).getrandbits(32)``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

N = 624
M = 397
MATRIX_A = np.uint32(0x9908B0DF)
UPPER_MASK = np.uint32(0x80000000)
LOWER_MASK = np.uint32(0x7FFFFFFF)
MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

U32_MAX = float(MASK32)


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 finalizer; used to derive child seeds."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(base: int, ordinal: int) -> int:
    """Seed for the ``ordinal``-th parallel task of a run seeded with ``base``."""
    return splitmix64((base + ordinal) & MASK64)


def entropy_seed() -> int:
    return int.from_bytes(os.urandom(8), "little")


@dataclass(frozen=True)
class SeedSource:
    mode: str = "os-entropy"
    value: int | None = None

    def __post_init__(self):
        if self.mode not in ("os-entropy", "explicit"):
            raise ValueError(f"unknown seed mode {self.mode!r}")
        if (self.mode == "explicit") != (self.value is not None):
            raise ValueError("an explicit seed needs a value, os-entropy must not have one")
        if self.value is not None and not 0 <= self.value <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_option(cls, value: int | None) -> "SeedSource":
        return cls("os-entropy") if value is None else cls("explicit", value)

    def resolve(self) -> int:
        return entropy_seed() if self.value is None else self.value


@dataclass(frozen=True)
class CauchyParams:
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"Cauchy scale must be positive and finite, got {self.scale}")
        if not math.isfinite(self.location):
            raise ValueError("Cauchy location must be finite")


def _init_genrand(s: int) -> list[int]:
    mt = [0] * N
    mt[0] = s & MASK32
    for i in range(1, N):
        mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> 30)) + i) & MASK32
    return mt


def _init_by_array(key: list[int]) -> list[int]:
    mt = _init_genrand(19650218)
    i, j = 1, 0
    for _ in range(max(N, len(key))):
        mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1664525)) + key[j] + j) & MASK32
        i += 1
        j += 1
        if i >= N:
            mt[0] = mt[N - 1]
            i = 1
        if j >= len(key):
            j = 0
    for _ in range(N - 1):
        mt[i] = ((mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1566083941)) - i) & MASK32
        i += 1
        if i >= N:
            mt[0] = mt[N - 1]
            i = 1
    mt[0] = 0x80000000
    return mt


def seed_key(seed: int) -> list[int]:
    """Little-endian 32-bit words of ``seed``; ``[0]`` for zero."""
    key = []
    while seed:
        key.append(seed & MASK32)
        seed >>= 32
    return key or [0]


def _twist(mt: np.ndarray) -> None:
    # The recurrence reads mt[i + M] (old for i < N - M, freshly written after),
    # so three slices plus the wrap-around element reproduce the serial loop.
    def step(lo, hi, src):
        y = (mt[lo:hi] & UPPER_MASK) | (mt[lo + 1:hi + 1] & LOWER_MASK)
        mt[lo:hi] = src ^ (y >> 1) ^ ((y & 1) * MATRIX_A)

    step(0, N - M, mt[M:N].copy())
    step(N - M, 2 * (N - M), mt[0:N - M].copy())
    step(2 * (N - M), N - 1, mt[N - M:N - M + (N - 1 - 2 * (N - M))].copy())
    y = (mt[N - 1] & UPPER_MASK) | (mt[0] & LOWER_MASK)
    mt[N - 1] = mt[M - 1] ^ (y >> np.uint32(1)) ^ ((y & np.uint32(1)) * MATRIX_A)


def _temper(y: np.ndarray) -> np.ndarray:
    y = y ^ (y >> 11)
    y = y ^ ((y << 7) & np.uint32(0x9D2C5680))
    y = y ^ ((y << 15) & np.uint32(0xEFC60000))
    return y ^ (y >> 18)


class MT19937:
    """Single-owner MT19937 stream.

    Outputs are produced a state-block (624 words) at a time and served from a
    buffer, so scalar and array draws interleave on one sequence.
    """

    def __init__(self, seed: int | None = None):
        self.seed = SeedSource.from_option(seed).resolve()
        self.state = np.array(_init_by_array(seed_key(self.seed)), dtype=np.uint32)
        self.index = N
        self._block = np.empty(0, dtype=np.uint32)
        self._cached_gauss: float | None = None

    def spawn(self, ordinal: int) -> "MT19937":
        return MT19937(derive_seed(self.seed, ordinal))

    def _refill(self) -> None:
        _twist(self.state)
        self._block = _temper(self.state)
        self.index = 0

    def next_u32(self) -> int:
        if self.index >= N:
            self._refill()
        v = int(self._block[self.index])
        self.index += 1
        return v

    def u32_array(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.uint32)
        pos = 0
        while pos < size:
            if self.index >= N:
                self._refill()
            take = min(N - self.index, size - pos)
            out[pos:pos + take] = self._block[self.index:self.index + take]
            self.index += take
            pos += take
        return out

    def uniform01(self) -> float:
        """Uniform on the closed interval [0, 1]."""
        return self.next_u32() / U32_MAX

    def uniform_array(self, size: int) -> np.ndarray:
        return self.u32_array(size) / U32_MAX

    def res53_array(self, size: int) -> np.ndarray:
        """53-bit resolution uniforms on [0, 1), two words per value."""
        w = self.u32_array(2 * size).reshape(size, 2)
        a = (w[:, 0] >> 5).astype(np.float64)
        b = (w[:, 1] >> 6).astype(np.float64)
        return (a * 67108864.0 + b) / 9007199254740992.0

    def gaussian(self) -> float:
        """Standard normal variate, polar Box-Muller; the second of each pair is cached."""
        if self._cached_gauss is not None:
            g, self._cached_gauss = self._cached_gauss, None
            return g
        while True:
            v1 = 2.0 * self.uniform01() - 1.0
            v2 = 2.0 * self.uniform01() - 1.0
            rsq = v1 * v1 + v2 * v2
            if 0.0 < rsq < 1.0:
                break
        fac = math.sqrt(-2.0 * math.log(rsq) / rsq)
        self._cached_gauss = v1 * fac
        return v2 * fac

    def gaussian_array(self, size: int) -> np.ndarray:
        return np.array([self.gaussian() for _ in range(size)])

    def cauchy(self, params: CauchyParams = CauchyParams()) -> float:
        u = self.uniform01()
        while u == 0.0 or u == 1.0:
            u = self.uniform01()
        return float(cauchy_quantile(u, params))

    def cauchy_array(self, size: int, params: CauchyParams = CauchyParams()) -> np.ndarray:
        return np.array([self.cauchy(params) for _ in range(size)])


def cauchy_quantile(u, params: CauchyParams = CauchyParams()):
    """Inverse of the Cauchy CDF; accepts scalars or arrays in (0, 1)."""
    if np.ndim(u) == 0 and float(u) == 0.5:
        return params.location
    return params.location + params.scale * np.tan(np.pi * (np.asarray(u, dtype=float) - 0.5))


def cauchy_cdf(x, params: CauchyParams = CauchyParams()):
    return np.arctan((np.asarray(x, dtype=float) - params.location) / params.scale) / np.pi + 0.5
