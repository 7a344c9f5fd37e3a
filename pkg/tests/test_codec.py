import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlwe_pcp.codec import (
    HEADER_SIZE,
    MAGIC,
    CodecError,
    Kind,
    Protocol,
    Session,
    decode,
    decode_stream,
    encode,
    frame,
    read_frame,
)
from rlwe_pcp.ot import OtRequest, OtResponse
from rlwe_pcp.pkc import Ciphertext, PublicKey, SecretKey
from rlwe_pcp.ring import PRESETS, BinaryVector, RingElement, make_params, preset
from rlwe_pcp.zkp import ZkpChallenge, ZkpResponse, ZkpStatement


def payload(record):
    return read_frame(record)[1]


def test_bits_payload_example(toy):
    assert payload(encode(BinaryVector([1, 0, 1, 0]), toy)) == b"\x05"


def test_ring_payload_example(toy):
    assert payload(encode(RingElement([16, 0, 0, 0], toy))) == bytes.fromhex("1000000000000000")


def test_record_header(toy):
    rec = encode(RingElement([1, 2, 3, 4], toy))
    assert rec[:4] == MAGIC == b"PCP1"
    assert rec[4] == 0x02
    assert struct.unpack("<I", rec[5:9])[0] == len(rec) - HEADER_SIZE == 8


def test_params_payload(p256):
    assert payload(encode(p256)) == struct.pack("<III", 256, 7681, 4000)


def test_wide_coefficients():
    # q >= 2^16 switches to u32 coefficients
    p = make_params(4, 65537, 1.0)
    rec = encode(RingElement([65536, 1, 0, 0], p))
    assert payload(rec) == struct.pack("<4I", 65536, 1, 0, 0)
    assert decode(rec, Kind.RING, p) == RingElement([65536, 1, 0, 0], p)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_params_roundtrip(name):
    p = preset(name)
    assert decode(encode(p), Kind.PARAMS) == p


def test_kind_tags():
    assert [k.value for k in Kind][:11] == [0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x10, 0x11, 0x20, 0x21, 0x22]


def test_bits_lsb_first_multi_byte():
    p = make_params(16, 97, 1.0)
    m = BinaryVector([1] + [0] * 7 + [0, 1] + [0] * 6)
    assert payload(encode(m, p)) == b"\x01\x02"


# --- rejection ----------------------------------------------------------------


def test_coefficient_out_of_range(toy):
    bad = frame(Kind.RING, struct.pack("<4H", 17, 0, 0, 0))
    with pytest.raises(CodecError, match="out of range"):
        decode(bad, Kind.RING, toy)


def test_truncated(toy):
    rec = encode(RingElement([1, 2, 3, 4], toy))
    with pytest.raises(CodecError, match="truncated"):
        decode(rec[:-1], Kind.RING, toy)
    with pytest.raises(CodecError, match="truncated"):
        decode(rec[:5], Kind.RING, toy)


def test_bad_magic(toy):
    rec = encode(RingElement([1, 2, 3, 4], toy))
    with pytest.raises(CodecError, match="magic"):
        decode(b"PCP2" + rec[4:], Kind.RING, toy)


def test_kind_mismatch(toy):
    rec = encode(RingElement([1, 2, 3, 4], toy))
    with pytest.raises(CodecError, match="expected"):
        decode(rec, Kind.BITS, toy)


def test_unknown_kind(toy):
    with pytest.raises(CodecError, match="unknown record kind"):
        decode(MAGIC + b"\x7f" + struct.pack("<I", 0), Kind.RING, toy)


def test_length_mismatch(toy):
    with pytest.raises(CodecError):
        decode(frame(Kind.RING, b"\x00" * 6), Kind.RING, toy)
    with pytest.raises(CodecError, match="trailing"):
        decode(encode(RingElement([1, 2, 3, 4], toy)) + b"\x00", Kind.RING, toy)


def test_nonzero_padding_bits(toy):
    with pytest.raises(CodecError, match="padding"):
        decode(frame(Kind.BITS, b"\x15"), Kind.BITS, toy)


def test_invalid_params_record():
    with pytest.raises(CodecError):
        decode(frame(Kind.PARAMS, struct.pack("<III", 6, 13, 1000)), Kind.PARAMS)


def test_unrepresentable_sigma():
    with pytest.raises(CodecError):
        encode(make_params(4, 17, 1.0005))


def test_mismatched_params(toy, p256):
    with pytest.raises(CodecError):
        encode(RingElement.zero(toy), p256)
    with pytest.raises(CodecError):
        encode(BinaryVector([1, 0]), toy)


def test_needs_params_for_bits(toy):
    with pytest.raises(CodecError):
        encode(BinaryVector([1, 0, 0, 0]))
    with pytest.raises(CodecError):
        decode(encode(BinaryVector([1, 0, 0, 0]), toy), Kind.BITS)


def test_empty_ot_response(toy):
    with pytest.raises(CodecError):
        encode(OtResponse(()), toy)
    with pytest.raises(CodecError):
        decode(frame(Kind.OT_RESPONSE, b""), Kind.OT_RESPONSE, toy)


def test_composite_trailing_bytes(toy):
    inner = encode(RingElement([1, 2, 3, 4], toy))
    with pytest.raises(CodecError, match="trailing"):
        decode(frame(Kind.SECRET_KEY, inner + b"\x00"), Kind.SECRET_KEY, toy)


def test_decode_stream(toy):
    a, b = RingElement([1, 2, 3, 4], toy), RingElement([0, 0, 16, 0], toy)
    data = encode(a) + encode(b)
    got_a, pos = decode_stream(data, Kind.RING, toy)
    got_b, end = decode_stream(data, Kind.RING, toy, pos)
    assert (got_a, got_b, end) == (a, b, len(data))


def test_session_roundtrip():
    s = Session(Protocol.OT, b"\x01" * 32, b"\x02" * 32, 3, 8, 5)
    assert decode(encode(s), Kind.SESSION) == s


# --- roundtrip properties -----------------------------------------------------

TOY = make_params(4, 17, 1.0)
ring4 = st.lists(st.integers(0, 16), min_size=4, max_size=4).map(lambda v: RingElement(v, TOY))
bits4 = st.lists(st.integers(0, 1), min_size=4, max_size=4).map(BinaryVector)

values = st.one_of(
    ring4,
    bits4,
    st.builds(PublicKey, ring4, ring4),
    st.builds(SecretKey, ring4),
    st.builds(Ciphertext, ring4, ring4),
    st.builds(OtRequest, ring4, ring4),
    st.lists(bits4, min_size=1, max_size=9).map(lambda ms: OtResponse(tuple(ms))),
    st.builds(ZkpStatement, ring4, ring4, bits4, ring4),
    st.builds(ZkpChallenge, ring4),
    st.builds(ZkpResponse, ring4),
)

KIND_OF = {
    RingElement: Kind.RING,
    BinaryVector: Kind.BITS,
    PublicKey: Kind.PUBLIC_KEY,
    SecretKey: Kind.SECRET_KEY,
    Ciphertext: Kind.CIPHERTEXT,
    OtRequest: Kind.OT_REQUEST,
    OtResponse: Kind.OT_RESPONSE,
    ZkpStatement: Kind.ZKP_STATEMENT,
    ZkpChallenge: Kind.ZKP_CHALLENGE,
    ZkpResponse: Kind.ZKP_RESPONSE,
}


@settings(max_examples=500, deadline=None)
@given(values)
def test_roundtrip_toy(value):
    rec = encode(value, TOY)
    assert decode(rec, KIND_OF[type(value)], TOY) == value
    assert read_frame(rec)[2] == len(rec)


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=64))
def test_decode_never_crashes_on_garbage(data):
    for kind in KIND_OF.values():
        try:
            decode(data, kind, TOY)
        except CodecError:
            pass
