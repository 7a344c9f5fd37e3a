"""Ring-LWE public-key encryption, key exchange, oblivious transfer and
zero-knowledge proof over Z_q[x]/(x^n + 1), with schoolbook, NTT and
precomputed-table (PARM) multipliers."""

from .multiplier import BACKENDS, OpCounter, count_ops, get_multiplier
from .pkc import Ciphertext, PublicKey, SecretKey, decrypt, decryption_noise, encrypt, keygen
from .ring import (
    BinaryVector,
    ParamError,
    ParamSet,
    RingElement,
    add,
    lift_binary,
    make_params,
    preset,
    round_to_binary,
    schoolbook_mul,
    sub,
)
from .sampler import Drbg, sample_binary, sample_gaussian, sample_uniform

__version__ = "0.1.0"

__all__ = [
    "BACKENDS",
    "BinaryVector",
    "Ciphertext",
    "Drbg",
    "OpCounter",
    "ParamError",
    "ParamSet",
    "PublicKey",
    "RingElement",
    "SecretKey",
    "add",
    "count_ops",
    "decrypt",
    "decryption_noise",
    "encrypt",
    "get_multiplier",
    "keygen",
    "lift_binary",
    "make_params",
    "preset",
    "round_to_binary",
    "sample_binary",
    "sample_gaussian",
    "sample_uniform",
    "schoolbook_mul",
    "sub",
]
