"""Key exchange as encapsulation over the PKC blocks.

The initiator publishes a fresh public key, the responder encrypts a random
n-bit vector k under it, and both sides hash k.  The shared key is
SHA3-256 of k packed LSB-first into ceil(n/8) bytes (the BinaryVector wire
payload).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import pkc
from .multiplier import Multiplier
from .pkc import Ciphertext, PublicKey, SecretKey
from .ring import BinaryVector, ParamSet
from .sampler import Drbg, sample_binary


def shared_key_digest(raw: BinaryVector) -> bytes:
    return hashlib.sha3_256(np.packbits(raw.bits, bitorder="little").tobytes()).digest()


@dataclass(frozen=True)
class SharedSecret:
    key: bytes
    raw: BinaryVector

    @classmethod
    def from_raw(cls, raw: BinaryVector) -> "SharedSecret":
        return cls(shared_key_digest(raw), raw)


def kex_initiate(
    params: ParamSet, rng: Drbg, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> tuple[PublicKey, SecretKey]:
    return pkc.keygen(params, rng, backend)


def kex_respond(
    pk: PublicKey,
    rng: Drbg | None,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    *,
    k: BinaryVector | None = None,
    **enc_randomness,
) -> tuple[Ciphertext, SharedSecret]:
    if k is None:
        k = sample_binary(pk.params, rng)
    ct = pkc.encrypt(pk, k, rng, backend, **enc_randomness)
    return ct, SharedSecret.from_raw(k)


def kex_finalize(
    sk: SecretKey, ct: Ciphertext, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> SharedSecret:
    return SharedSecret.from_raw(pkc.decrypt(sk, ct, backend))
