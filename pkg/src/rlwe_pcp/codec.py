"""Binary wire format.

Every record is::

    magic  b"PCP1"
    kind   u8
    length u32 little-endian (payload byte count)
    payload

Payloads:
  ParamSet      n, q, round(sigma * 1000) as u32 LE
  RingElement   n coefficients, u16 LE when q < 2^16 else u32 LE
  BinaryVector  ceil(n/8) bytes, bit i in byte i//8 at position i%8 (LSB first);
                padding bits must be zero
  PublicKey     RingElement record a, RingElement record b
  SecretKey     RingElement record s
  Ciphertext    RingElement records c0, c1
  OtRequest     RingElement records v0, v1
  OtResponse    l >= 1 BinaryVector records
  ZkpStatement  RingElement a, RingElement b, BinaryVector m, RingElement c
  ZkpChallenge  RingElement u
  ZkpResponse   RingElement x
  Session       protocol u8, flags u8, seed_a 32B, seed_b 32B, l u32, choice u32

Hash used for KEX shared keys: SHA3-256 over the BinaryVector payload.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass

import numpy as np

from .ot import OtRequest, OtResponse
from .pkc import Ciphertext, PublicKey, SecretKey
from .ring import BinaryVector, ParamError, ParamSet, RingElement, make_params
from .zkp import ZkpChallenge, ZkpResponse, ZkpStatement

MAGIC = b"PCP1"
_HEADER = struct.Struct("<4sBI")
HEADER_SIZE = _HEADER.size


class CodecError(ValueError):
    pass


class Kind(enum.IntEnum):
    PARAMS = 0x01
    RING = 0x02
    BITS = 0x03
    PUBLIC_KEY = 0x04
    SECRET_KEY = 0x05
    CIPHERTEXT = 0x06
    OT_REQUEST = 0x10
    OT_RESPONSE = 0x11
    ZKP_STATEMENT = 0x20
    ZKP_CHALLENGE = 0x21
    ZKP_RESPONSE = 0x22
    SESSION = 0x30


class Protocol(enum.IntEnum):
    KEX = 1
    OT = 2
    ZKP = 3


FLAG_FORGE = 0x01
FLAG_INSECURE = 0x02


@dataclass(frozen=True)
class Session:
    """Transcript metadata: which protocol ran, with which seeds and options."""

    protocol: Protocol
    seed_a: bytes
    seed_b: bytes
    flags: int = 0
    l: int = 0
    choice: int = 0


_SESSION = struct.Struct("<BB32s32sII")


def coeff_width(q: int) -> int:
    return 2 if q < 1 << 16 else 4


def frame(kind: Kind, payload: bytes) -> bytes:
    return _HEADER.pack(MAGIC, int(kind), len(payload)) + payload


def read_frame(data: bytes, offset: int = 0) -> tuple[Kind, bytes, int]:
    """Split one record off ``data`` at ``offset``; returns (kind, payload, end)."""
    if len(data) - offset < HEADER_SIZE:
        raise CodecError(f"truncated header at offset {offset}")
    magic, kind, length = _HEADER.unpack_from(data, offset)
    if magic != MAGIC:
        raise CodecError(f"bad magic {magic!r} at offset {offset}")
    try:
        kind = Kind(kind)
    except ValueError:
        raise CodecError(f"unknown record kind 0x{kind:02x}") from None
    start = offset + HEADER_SIZE
    end = start + length
    if end > len(data):
        raise CodecError(f"truncated payload: need {length} bytes, have {len(data) - start}")
    return kind, bytes(data[start:end]), end


# --- payload encoders -----------------------------------------------------


def _ring_payload(v: RingElement, params: ParamSet) -> bytes:
    if v.params.n != params.n or v.params.q != params.q:
        raise CodecError("ring element does not match the parameter set")
    dtype = "<u2" if coeff_width(params.q) == 2 else "<u4"
    return v.coeffs.astype(dtype).tobytes()


def _bits_payload(m: BinaryVector, params: ParamSet) -> bytes:
    if m.n != params.n:
        raise CodecError(f"bit vector has {m.n} entries, ring needs {params.n}")
    return np.packbits(m.bits, bitorder="little").tobytes()


def _params_payload(p: ParamSet) -> bytes:
    milli = round(p.sigma * 1000)
    if milli <= 0 or not math.isclose(milli / 1000, p.sigma, rel_tol=0, abs_tol=1e-12):
        raise CodecError(f"sigma={p.sigma} is not representable in thousandths")
    if p.n >= 1 << 32 or p.q >= 1 << 32:
        raise CodecError("n and q must fit in u32")
    return struct.pack("<III", p.n, p.q, milli)


def encode(value, params: ParamSet | None = None) -> bytes:
    """Serialize a domain value as one complete record."""
    if isinstance(value, ParamSet):
        return frame(Kind.PARAMS, _params_payload(value))
    if isinstance(value, Session):
        return frame(
            Kind.SESSION,
            _SESSION.pack(int(value.protocol), value.flags, value.seed_a, value.seed_b, value.l, value.choice),
        )
    if params is None:
        params = _params_of(value)
    if isinstance(value, RingElement):
        return frame(Kind.RING, _ring_payload(value, params))
    if isinstance(value, BinaryVector):
        return frame(Kind.BITS, _bits_payload(value, params))
    ring = lambda v: encode(v, params)  # noqa: E731
    if isinstance(value, PublicKey):
        return frame(Kind.PUBLIC_KEY, ring(value.a) + ring(value.b))
    if isinstance(value, SecretKey):
        return frame(Kind.SECRET_KEY, ring(value.s))
    if isinstance(value, Ciphertext):
        return frame(Kind.CIPHERTEXT, ring(value.c0) + ring(value.c1))
    if isinstance(value, OtRequest):
        return frame(Kind.OT_REQUEST, ring(value.v0) + ring(value.v1))
    if isinstance(value, OtResponse):
        if not value.masked:
            raise CodecError("OT response must carry at least one vector")
        return frame(Kind.OT_RESPONSE, b"".join(ring(m) for m in value.masked))
    if isinstance(value, ZkpStatement):
        return frame(Kind.ZKP_STATEMENT, ring(value.a) + ring(value.b) + ring(value.m) + ring(value.c))
    if isinstance(value, ZkpChallenge):
        return frame(Kind.ZKP_CHALLENGE, ring(value.u))
    if isinstance(value, ZkpResponse):
        return frame(Kind.ZKP_RESPONSE, ring(value.x))
    raise CodecError(f"cannot encode {type(value).__name__}")


def _params_of(value) -> ParamSet:
    p = getattr(value, "params", None)
    if isinstance(p, ParamSet):
        return p
    for attr in ("x", "u", "v0", "s"):
        inner = getattr(value, attr, None)
        if isinstance(inner, RingElement):
            return inner.params
    raise CodecError(f"{type(value).__name__} needs an explicit ParamSet")


# --- decoders ---------------------------------------------------------------


def _decode_ring(payload: bytes, params: ParamSet) -> RingElement:
    width = coeff_width(params.q)
    if len(payload) != width * params.n:
        raise CodecError(f"ring payload is {len(payload)} bytes, expected {width * params.n}")
    coeffs = np.frombuffer(payload, dtype="<u2" if width == 2 else "<u4").astype(np.int64)
    if coeffs.size and coeffs.max() >= params.q:
        raise CodecError(f"coefficient {int(coeffs.max())} out of range for q={params.q}")
    return RingElement._wrap(coeffs, params)


def _decode_bits(payload: bytes, params: ParamSet) -> BinaryVector:
    size = (params.n + 7) // 8
    if len(payload) != size:
        raise CodecError(f"bit payload is {len(payload)} bytes, expected {size}")
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    if bits[params.n :].any():
        raise CodecError("nonzero padding bits in bit vector")
    return BinaryVector._wrap(bits[: params.n].copy())


def _decode_params(payload: bytes) -> ParamSet:
    if len(payload) != 12:
        raise CodecError(f"parameter payload is {len(payload)} bytes, expected 12")
    n, q, milli = struct.unpack("<III", payload)
    try:
        return make_params(n, q, milli / 1000)
    except ParamError as exc:
        raise CodecError(f"invalid parameter record: {exc}") from None


def _split(payload: bytes, kinds: list[Kind], params: ParamSet) -> list:
    out, pos = [], 0
    for kind in kinds:
        out.append(_decode_at(payload, pos, kind, params))
        pos = out[-1][1]
    if pos != len(payload):
        raise CodecError(f"{len(payload) - pos} trailing bytes in composite record")
    return [v for v, _ in out]


def _decode_at(data: bytes, offset: int, kind: Kind, params: ParamSet | None):
    got, payload, end = read_frame(data, offset)
    if got != kind:
        raise CodecError(f"expected {kind.name} record, found {got.name}")
    return _decode_payload(kind, payload, params), end


def _decode_payload(kind: Kind, payload: bytes, params: ParamSet | None):
    if kind == Kind.PARAMS:
        return _decode_params(payload)
    if kind == Kind.SESSION:
        if len(payload) != _SESSION.size:
            raise CodecError(f"session payload is {len(payload)} bytes, expected {_SESSION.size}")
        proto, flags, sa, sb, l, choice = _SESSION.unpack(payload)
        try:
            proto = Protocol(proto)
        except ValueError:
            raise CodecError(f"unknown protocol id {proto}") from None
        return Session(proto, sa, sb, flags, l, choice)
    if params is None:
        raise CodecError(f"decoding {kind.name} requires a ParamSet")
    R, B = Kind.RING, Kind.BITS
    if kind == R:
        return _decode_ring(payload, params)
    if kind == B:
        return _decode_bits(payload, params)
    if kind == Kind.PUBLIC_KEY:
        return PublicKey(*_split(payload, [R, R], params))
    if kind == Kind.SECRET_KEY:
        return SecretKey(*_split(payload, [R], params))
    if kind == Kind.CIPHERTEXT:
        return Ciphertext(*_split(payload, [R, R], params))
    if kind == Kind.OT_REQUEST:
        return OtRequest(*_split(payload, [R, R], params))
    if kind == Kind.OT_RESPONSE:
        masked, pos = [], 0
        while pos < len(payload):
            m, pos = _decode_at(payload, pos, B, params)
            masked.append(m)
        if not masked:
            raise CodecError("OT response carries no vectors")
        return OtResponse(tuple(masked))
    if kind == Kind.ZKP_STATEMENT:
        return ZkpStatement(*_split(payload, [R, R, B, R], params))
    if kind == Kind.ZKP_CHALLENGE:
        return ZkpChallenge(*_split(payload, [R], params))
    if kind == Kind.ZKP_RESPONSE:
        return ZkpResponse(*_split(payload, [R], params))
    raise CodecError(f"no decoder for {kind.name}")  # pragma: no cover


def decode(data: bytes, kind: Kind, params: ParamSet | None = None):
    """Parse exactly one record of ``kind`` from ``data`` and validate it."""
    value, end = _decode_at(data, 0, Kind(kind), params)
    if end != len(data):
        raise CodecError(f"{len(data) - end} trailing bytes after record")
    return value


def decode_stream(data: bytes, kind: Kind, params: ParamSet | None, offset: int = 0):
    """Decode one record at ``offset``; returns (value, next offset)."""
    return _decode_at(data, offset, Kind(kind), params)
