"""Ring-LWE public-key encryption of n-bit messages.

KeyGen:  b = a*s + e
Enc:     c0 = b*r0 + r2 + t*m,  c1 = a*r0 + r1
Dec:     m = round_to_binary(c0 - c1*s)

The keyword-only ``a``, ``s``, ``e``, ``r0``, ``r1``, ``r2`` arguments let
tests pin any of the random values; anything left as None is drawn from the
rng in the order listed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multiplier import Multiplier, resolve
from .ring import BinaryVector, ParamSet, RingElement, lift_binary, round_to_binary
from .sampler import Drbg, sample_gaussian, sample_uniform

DEFAULT_BACKEND = "ntt"


@dataclass(frozen=True)
class PublicKey:
    a: RingElement
    b: RingElement

    @property
    def params(self) -> ParamSet:
        return self.a.params


@dataclass(frozen=True)
class SecretKey:
    s: RingElement

    @property
    def params(self) -> ParamSet:
        return self.s.params


@dataclass(frozen=True)
class Ciphertext:
    c0: RingElement
    c1: RingElement

    @property
    def params(self) -> ParamSet:
        return self.c0.params


def keygen(
    params: ParamSet,
    rng: Drbg | None,
    backend: str | Multiplier = DEFAULT_BACKEND,
    *,
    a: RingElement | None = None,
    s: RingElement | None = None,
    e: RingElement | None = None,
) -> tuple[PublicKey, SecretKey]:
    mul = resolve(backend, params)
    if a is None:
        a = sample_uniform(params, rng)
    if s is None:
        s = sample_gaussian(params, rng)
    if e is None:
        e = sample_gaussian(params, rng)
    return PublicKey(a, mul(a, s) + e), SecretKey(s)


def encrypt(
    pk: PublicKey,
    m: BinaryVector,
    rng: Drbg | None,
    backend: str | Multiplier = DEFAULT_BACKEND,
    *,
    r0: RingElement | None = None,
    r1: RingElement | None = None,
    r2: RingElement | None = None,
) -> Ciphertext:
    params = pk.params
    if m.n != params.n:
        raise ValueError(f"message has {m.n} bits, ring needs {params.n}")
    mul = resolve(backend, params)
    if r0 is None:
        r0 = sample_gaussian(params, rng)
    if r1 is None:
        r1 = sample_gaussian(params, rng)
    if r2 is None:
        r2 = sample_gaussian(params, rng)
    c0 = mul(pk.b, r0) + r2 + lift_binary(m, params)
    c1 = mul(pk.a, r0) + r1
    return Ciphertext(c0, c1)


def _residual(sk: SecretKey, ct: Ciphertext, backend) -> RingElement:
    return ct.c0 - resolve(backend, sk.params)(ct.c1, sk.s)


def decrypt(sk: SecretKey, ct: Ciphertext, backend: str | Multiplier = DEFAULT_BACKEND) -> BinaryVector:
    return round_to_binary(_residual(sk, ct, backend))


def decryption_noise(
    sk: SecretKey, ct: Ciphertext, m: BinaryVector, backend: str | Multiplier = DEFAULT_BACKEND
) -> int:
    """Infinity norm of c0 - c1*s - t*m; decryption is exact below ``params.noise_bound``."""
    return (_residual(sk, ct, backend) - lift_binary(m, sk.params)).inf_norm()
