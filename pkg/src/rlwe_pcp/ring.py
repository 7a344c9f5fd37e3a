"""Arithmetic in R_q = Z_q[x]/(x^n + 1).

Coefficients are always stored as least residues in [0, q).  Centered
representatives only appear transiently (rounding, noise norms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ParamError(ValueError):
    """Raised for an invalid ring parameter set."""


def is_prime(q: int) -> bool:
    # deterministic Miller-Rabin, exact for q < 3.3e24
    if q < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if q % p == 0:
            return q == p
    d, r = q - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in small:
        x = pow(base, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(r - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def _smallest_primitive_root_2n(n: int, q: int) -> int:
    order = 2 * n
    exp = (q - 1) // order
    for g in range(2, q):
        cand = pow(g, exp, q)
        # cand has order dividing 2n; primitive iff cand^n == -1
        if pow(cand, n, q) == q - 1:
            break
    else:  # pragma: no cover - q prime with q = 1 mod 2n always has one
        raise ParamError(f"no primitive {order}-th root of unity mod {q}")
    # every primitive 2n-th root is cand^k for odd k; take the smallest
    return min(pow(cand, k, q) for k in range(1, order, 2))


@dataclass(frozen=True)
class ParamSet:
    n: int
    q: int
    sigma: float
    t: int = field(repr=False)
    psi: int = field(repr=False)
    omega: int = field(repr=False)
    n_inv: int = field(repr=False)

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1

    @property
    def noise_bound(self) -> int:
        """Infinity-norm bound under which rounding is guaranteed correct."""
        return self.q // 4 - 1


def make_params(n: int, q: int, sigma: float) -> ParamSet:
    """Validate ``(n, q, sigma)`` and derive t, psi, omega and n^-1 mod q.

    psi is the smallest primitive 2n-th root of unity mod q, so the result
    is a pure function of the inputs.
    """
    if not isinstance(n, int) or n < 2 or n & (n - 1):
        raise ParamError(f"n must be a power of 2 and >= 2, got {n!r}")
    if not isinstance(q, int) or not is_prime(q):
        raise ParamError(f"q must be prime, got {q!r}")
    if q % (2 * n) != 1:
        raise ParamError(f"q must be 1 mod 2n: {q} mod {2 * n} = {q % (2 * n)}")
    if n * q * q >= 1 << 62:
        raise ParamError("n * q^2 must stay below 2^62 (int64 accumulation)")
    if not sigma > 0 or not math.isfinite(sigma):
        raise ParamError(f"sigma must be a positive real, got {sigma!r}")
    psi = _smallest_primitive_root_2n(n, q)
    return ParamSet(
        n=n,
        q=q,
        sigma=float(sigma),
        t=q // 2,
        psi=psi,
        omega=psi * psi % q,
        n_inv=pow(n, -1, q),
    )


PRESETS = {
    "toy": (4, 17, 1.0),
    "n256": (256, 7681, 4.0),
    "n512": (512, 12289, 4.0),
    "n1024": (1024, 12289, 3.0),
}

# ZKP completeness needs less noise than the PKC at n=256 (the residual has an e*u term)
ZKP_PRESET = (256, 7681, 3.0)


def preset(name: str) -> ParamSet:
    try:
        return make_params(*PRESETS[name])
    except KeyError:
        raise ParamError(f"unknown parameter set {name!r}; choose from {sorted(PRESETS)}") from None


class RingElement:
    """An element of R_q as a read-only length-n int64 coefficient array."""

    __slots__ = ("coeffs", "params")

    def __init__(self, coeffs, params: ParamSet):
        arr = np.array(coeffs, dtype=np.int64)
        if arr.shape != (params.n,):
            raise ValueError(f"expected {params.n} coefficients, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= params.q):
            raise ValueError(f"coefficients must lie in [0, {params.q})")
        arr.flags.writeable = False
        self.coeffs = arr
        self.params = params

    @classmethod
    def _wrap(cls, arr: np.ndarray, params: ParamSet) -> "RingElement":
        # trusted constructor: arr is already reduced, int64, length n
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj.coeffs = arr
        obj.params = params
        return obj

    @classmethod
    def from_ints(cls, values, params: ParamSet) -> "RingElement":
        """Build from arbitrary integers (negative values wrap mod q)."""
        return cls._wrap(np.asarray(values, dtype=np.int64) % params.q, params)

    @classmethod
    def zero(cls, params: ParamSet) -> "RingElement":
        return cls._wrap(np.zeros(params.n, dtype=np.int64), params)

    @classmethod
    def monomial(cls, degree: int, params: ParamSet, coeff: int = 1) -> "RingElement":
        arr = np.zeros(params.n, dtype=np.int64)
        arr[degree] = coeff % params.q
        return cls._wrap(arr, params)

    def centered(self) -> np.ndarray:
        """Representatives in (-q/2, q/2]."""
        q = self.params.q
        c = self.coeffs
        return np.where(c > q // 2, c - q, c)

    def inf_norm(self) -> int:
        return int(np.abs(self.centered()).max())

    def tolist(self) -> list[int]:
        return self.coeffs.tolist()

    def __add__(self, other: "RingElement") -> "RingElement":
        return add(self, other)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return sub(self, other)

    def __neg__(self) -> "RingElement":
        return RingElement._wrap((-self.coeffs) % self.params.q, self.params)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.params, self.coeffs.tobytes()))

    def __len__(self) -> int:
        return self.params.n

    def __repr__(self) -> str:
        head = ", ".join(map(str, self.coeffs[:8].tolist()))
        tail = ", ..." if self.params.n > 8 else ""
        return f"RingElement([{head}{tail}], q={self.params.q})"


class BinaryVector:
    """A length-n bit vector (plaintexts, OT pads)."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.flags.writeable = False
        self.bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BinaryVector":
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj.bits = arr
        return obj

    @classmethod
    def zeros(cls, n: int) -> "BinaryVector":
        return cls._wrap(np.zeros(n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def weight(self) -> int:
        return int(self.bits.sum())

    def __xor__(self, other: "BinaryVector") -> "BinaryVector":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BinaryVector._wrap(self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __len__(self) -> int:
        return self.n

    def tolist(self) -> list[int]:
        return self.bits.tolist()

    def __repr__(self) -> str:
        s = "".join(map(str, self.bits[:64].tolist()))
        return f"BinaryVector({s}{'...' if self.n > 64 else ''})"


def check_same_ring(a: RingElement, b: RingElement) -> ParamSet:
    if a.params.n != b.params.n:
        raise ValueError(f"dimension mismatch: {a.params.n} vs {b.params.n}")
    if a.params.q != b.params.q:
        raise ValueError(f"modulus mismatch: {a.params.q} vs {b.params.q}")
    return a.params


def add(a: RingElement, b: RingElement) -> RingElement:
    p = check_same_ring(a, b)
    return RingElement._wrap((a.coeffs + b.coeffs) % p.q, p)


def sub(a: RingElement, b: RingElement) -> RingElement:
    p = check_same_ring(a, b)
    return RingElement._wrap((a.coeffs - b.coeffs) % p.q, p)


def lift_binary(m: BinaryVector, params: ParamSet) -> RingElement:
    """Scale a bit vector by t into R_q."""
    if m.n != params.n:
        raise ValueError(f"message has {m.n} bits, ring needs {params.n}")
    return RingElement._wrap(m.bits.astype(np.int64) * params.t % params.q, params)


def round_to_binary(v: RingElement, params: ParamSet | None = None) -> BinaryVector:
    """Map each coefficient to the nearer of {0, t}; exact ties go to 0."""
    p = params or v.params
    lo = -(-p.q // 4)  # ceil(q/4)
    hi = 3 * p.q // 4
    c = v.coeffs
    return BinaryVector._wrap(((c >= lo) & (c <= hi)).astype(np.uint8))


def schoolbook_mul(a: RingElement, b: RingElement) -> RingElement:
    """Negacyclic product by direct convolution; the reference for every backend."""
    p = check_same_ring(a, b)
    n = p.n
    full = np.convolve(a.coeffs, b.coeffs)  # exact int64: n * q^2 < 2^63 for q < 2^26
    c = full[:n].copy()
    c[: n - 1] -= full[n:]
    return RingElement._wrap(c % p.q, p)
