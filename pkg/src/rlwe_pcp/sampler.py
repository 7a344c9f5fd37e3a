"""Seedable randomness: a SHAKE-256 counter-mode stream, CDT discrete Gaussian,
rejection-sampled uniform ring elements and fair bit vectors."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ring import BinaryVector, ParamSet, RingElement

SEED_BYTES = 32
_BLOCK = 8192
_CDT_BITS = 63


class Drbg:
    """Deterministic byte stream; block i is SHAKE-256(domain || seed || i).

    Output depends only on the seed and the total number of bytes consumed,
    not on how requests are split.
    """

    def __init__(self, seed: bytes):
        seed = bytes(seed)
        if len(seed) != SEED_BYTES:
            raise ValueError(f"seed must be {SEED_BYTES} bytes, got {len(seed)}")
        self.seed = seed
        self._block = 0
        self._buf = b""
        self._pos = 0

    @classmethod
    def from_hex(cls, text: str) -> "Drbg":
        text = text.strip()
        if len(text) != 2 * SEED_BYTES:
            raise ValueError(f"seed must be {2 * SEED_BYTES} hex characters, got {len(text)}")
        return cls(bytes.fromhex(text))

    def fork(self, label: str) -> "Drbg":
        """An independent stream derived from this seed; does not advance self."""
        return Drbg(hashlib.sha256(b"pcp-fork|" + label.encode() + b"|" + self.seed).digest())

    def _refill(self) -> None:
        xof = hashlib.shake_256(b"pcp-drbg" + self.seed + self._block.to_bytes(8, "little"))
        self._buf = self._buf[self._pos :] + xof.digest(_BLOCK)
        self._pos = 0
        self._block += 1

    def random_bytes(self, count: int) -> bytes:
        while len(self._buf) - self._pos < count:
            self._refill()
        out = self._buf[self._pos : self._pos + count]
        self._pos += count
        return out

    def uint64(self, count: int) -> np.ndarray:
        return np.frombuffer(self.random_bytes(8 * count), dtype="<u8").copy()

    def __repr__(self) -> str:
        return f"Drbg(seed={self.seed.hex()[:16]}..., block={self._block})"


@dataclass(frozen=True, eq=False)
class GaussianTable:
    """Inversion table for the discrete Gaussian with weight exp(-x^2 / 2 sigma^2).

    ``cdt[i]`` is P(X <= i - tail) scaled to 2^63 and rounded; the last entry
    is exactly 2^63.
    """

    sigma: float
    tail: int
    cdt: np.ndarray  # uint64, length 2*tail + 1

    def probabilities(self) -> np.ndarray:
        cdt = [0] + [int(v) for v in self.cdt]
        return np.array([hi - lo for lo, hi in zip(cdt, cdt[1:])], dtype=float) / 2.0**_CDT_BITS

    def support(self) -> np.ndarray:
        return np.arange(-self.tail, self.tail + 1)

    def mean(self) -> float:
        return float((self.support() * self.probabilities()).sum())

    def variance(self) -> float:
        p = self.probabilities()
        x = self.support()
        mu = (x * p).sum()
        return float(((x - mu) ** 2 * p).sum())


@lru_cache(maxsize=None)
def gaussian_table(sigma: float) -> GaussianTable:
    # floor keeps every sample inside [-6 sigma, 6 sigma]
    tail = math.floor(6 * sigma)
    xs = range(-tail, tail + 1)
    weights = [math.exp(-(x * x) / (2 * sigma * sigma)) for x in xs]
    total = math.fsum(weights)
    scale = 1 << _CDT_BITS
    cdt, acc = [], 0.0
    for w in weights:
        acc += w
        cdt.append(min(scale, round(acc / total * scale)))
    cdt[-1] = scale
    table = np.array(cdt, dtype=np.uint64)
    table.flags.writeable = False
    return GaussianTable(float(sigma), tail, table)


def sample_gaussian(params: ParamSet, rng: Drbg) -> RingElement:
    table = gaussian_table(params.sigma)
    draws = rng.uint64(params.n) >> np.uint64(64 - _CDT_BITS)
    values = np.searchsorted(table.cdt, draws, side="right").astype(np.int64) - table.tail
    return RingElement._wrap(values % params.q, params)


def sample_uniform(params: ParamSet, rng: Drbg) -> RingElement:
    """Uniform coefficients in [0, q) by masking to bit_length(q) and rejecting."""
    n, q = params.n, params.q
    mask = np.uint64((1 << q.bit_length()) - 1)
    out = np.empty(n, dtype=np.int64)
    filled = 0
    while filled < n:
        cand = rng.uint64(n - filled) & mask
        ok = cand[cand < q].astype(np.int64)
        out[filled : filled + ok.size] = ok
        filled += ok.size
    return RingElement._wrap(out, params)


def sample_binary(params: ParamSet, rng: Drbg) -> BinaryVector:
    raw = np.frombuffer(rng.random_bytes((params.n + 7) // 8), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: params.n]
    return BinaryVector._wrap(bits.copy())
