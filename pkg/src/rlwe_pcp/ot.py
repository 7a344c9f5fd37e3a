"""1-out-of-l oblivious transfer over the PKC.

Flows:
  1. sender -> receiver: public key and l uniform masks r_1..r_l
  2. receiver -> sender: v = (e0 + r_c, e1), where (e0, e1) = Enc_pk(K)
  3. sender -> receiver: m'_i = Dec_sk((v0 - r_i, v1)) xor m_i for every i
The receiver outputs m'_c xor K.  Choice indices are 1-based.

Masks are uniform over R_q rather than binary: binary masks differ by at most
1 per coefficient, which the rounding in Dec absorbs, so every m'_i would
decrypt under K and leak all messages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pkc
from .multiplier import Multiplier
from .pkc import PublicKey, SecretKey
from .ring import BinaryVector, ParamSet, RingElement, round_to_binary
from .sampler import Drbg, sample_binary, sample_uniform


class OtError(ValueError):
    pass


@dataclass(frozen=True)
class OtSenderState:
    messages: tuple[BinaryVector, ...]
    masks: tuple[RingElement, ...]
    sk: SecretKey
    pk: PublicKey
    backend: str | Multiplier = pkc.DEFAULT_BACKEND


@dataclass(frozen=True)
class OtOffer:
    pk: PublicKey
    masks: tuple[RingElement, ...]


@dataclass(frozen=True)
class OtReceiverState:
    choice: int
    pad: BinaryVector
    pk: PublicKey


@dataclass(frozen=True)
class OtRequest:
    v0: RingElement
    v1: RingElement


@dataclass(frozen=True)
class OtResponse:
    masked: tuple[BinaryVector, ...]


def ot_sender_setup(
    messages, params: ParamSet, rng: Drbg, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> tuple[OtSenderState, OtOffer]:
    messages = tuple(messages)
    if not messages:
        raise OtError("need at least one message")
    for m in messages:
        if m.n != params.n:
            raise OtError(f"message has {m.n} bits, ring needs {params.n}")
    pk, sk = pkc.keygen(params, rng, backend)
    masks = tuple(sample_uniform(params, rng) for _ in messages)
    return OtSenderState(messages, masks, sk, pk, backend), OtOffer(pk, masks)


def _check_choice(c: int, count: int) -> None:
    if not 1 <= c <= count:
        raise OtError(f"choice {c} outside [1, {count}]")


def ot_receiver_choose(
    c: int,
    masks,
    pk: PublicKey,
    rng: Drbg | None,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    *,
    pad: BinaryVector | None = None,
    **enc_randomness,
) -> tuple[OtReceiverState, OtRequest]:
    masks = tuple(masks)
    _check_choice(c, len(masks))
    if pad is None:
        pad = sample_binary(pk.params, rng)
    ct = pkc.encrypt(pk, pad, rng, backend, **enc_randomness)
    return OtReceiverState(c, pad, pk), OtRequest(ct.c0 + masks[c - 1], ct.c1)


def ot_sender_respond(state: OtSenderState, req: OtRequest) -> OtResponse:
    masked = []
    for m, r in zip(state.messages, state.masks):
        k_i = pkc.decrypt(state.sk, pkc.Ciphertext(req.v0 - r, req.v1), state.backend)
        masked.append(k_i ^ m)
    return OtResponse(tuple(masked))


def ot_receiver_finish(state: OtReceiverState, resp: OtResponse) -> BinaryVector:
    _check_choice(state.choice, len(resp.masked))
    return resp.masked[state.choice - 1] ^ state.pad


def unchosen_weights(state: OtReceiverState, resp: OtResponse) -> list[int]:
    """Hamming weights of m'_i xor K for i != c, as seen by the receiver."""
    return [
        (mi ^ state.pad).weight()
        for i, mi in enumerate(resp.masked, start=1)
        if i != state.choice
    ]


def guess_choice(masks, req: OtRequest) -> int:
    """Sender-side attack: pick the mask whose unmasked v0 rounds to the lightest vector.

    Against uniform masks this is no better than a blind guess.
    """
    weights = [round_to_binary(req.v0 - r).weight() for r in masks]
    return int(np.argmin(weights)) + 1
