import pytest

from rlwe_pcp.codec import CodecError, Kind, Protocol, Session
from rlwe_pcp.ring import make_params
from rlwe_pcp.transcript import (
    A_TO_B,
    B_TO_A,
    LOCAL,
    Transcript,
    random_ot_messages,
    run_kex,
    run_ot,
    run_zkp,
    transcript_replay,
)

SA, SB = b"\x0a" * 32, b"\x0b" * 32


def flip_bit(tr: Transcript, index: int, byte_from_end: int = 1) -> Transcript:
    entries = list(tr.entries)
    rec = bytearray(entries[index].record)
    rec[-byte_from_end] ^= 0x01
    entries[index] = type(entries[index])(entries[index].direction, bytes(rec))
    return Transcript(tr.params, entries)


def test_kex_session(p256):
    tr, res = run_kex(p256, SA, SB)
    assert res.ok and res.initiator.key == res.responder.key
    assert [(e.direction, e.kind) for e in tr.entries] == [
        (LOCAL, Kind.SESSION),
        (A_TO_B, Kind.PUBLIC_KEY),
        (B_TO_A, Kind.CIPHERTEXT),
    ]


def test_secret_key_only_when_insecure(p256):
    for runner in (lambda ins: run_kex(p256, SA, SB, insecure=ins), lambda ins: run_ot(p256, SA, SB, 2, 1, insecure=ins)):
        kinds = [e.kind for e in runner(False)[0].entries]
        assert Kind.SECRET_KEY not in kinds
        kinds = [e.kind for e in runner(True)[0].entries]
        assert kinds[-1] == Kind.SECRET_KEY


def test_ot_session(p256):
    tr, res = run_ot(p256, SA, SB, 8, 3)
    assert res.ok and res.recovered == res.messages[2]
    assert len(res.unchosen_weights) == 7
    kinds = [e.kind for e in tr.entries]
    assert kinds[0] == Kind.SESSION and kinds[1:9] == [Kind.BITS] * 8
    assert kinds[9] == Kind.PUBLIC_KEY and kinds[10:18] == [Kind.RING] * 8
    assert kinds[18:] == [Kind.OT_REQUEST, Kind.OT_RESPONSE]
    assert tr.session() == Session(Protocol.OT, SA, SB, 0, 8, 3)


def test_ot_session_rejects_bad_choice(p256):
    with pytest.raises(ValueError):
        run_ot(p256, SA, SB, 8, 9)
    with pytest.raises(ValueError):
        run_ot(p256, SA, SB, 2, 1, messages=random_ot_messages(p256, SA, 3))


def test_zkp_session(p256_zkp):
    _, honest = run_zkp(p256_zkp, SA, SB)
    _, forged = run_zkp(p256_zkp, SA, SB, forge=True)
    assert honest.accepted and not forged.accepted


@pytest.mark.parametrize("kind", ["kex", "ot", "ot-given", "zkp", "zkp-forge", "kex-insecure"])
def test_record_then_replay(kind, p256, p256_zkp):
    if kind.startswith("kex"):
        tr, _ = run_kex(p256, SA, SB, insecure=kind.endswith("insecure"))
    elif kind == "ot":
        tr, _ = run_ot(p256, SA, SB, 4, 2)
    elif kind == "ot-given":
        tr, _ = run_ot(p256, SA, SB, 3, 3, messages=random_ot_messages(p256, b"\x99" * 32, 3))
    else:
        tr, _ = run_zkp(p256_zkp, SA, SB, forge=kind == "zkp-forge")
    again = Transcript.from_bytes(tr.to_bytes())
    assert again == tr
    report = transcript_replay(again)
    assert report.matched and report.checked == len(tr.entries)


def test_same_seeds_same_bytes(p256_zkp):
    assert run_zkp(p256_zkp, SA, SB)[0].to_bytes() == run_zkp(p256_zkp, SA, SB)[0].to_bytes()


@pytest.mark.parametrize("index", [1, 9, 12, 18, 19])
def test_flipped_bit_reported_at_that_record(p256, index):
    tr, _ = run_ot(p256, SA, SB, 8, 3)
    report = transcript_replay(flip_bit(tr, index))
    assert not report.matched
    assert report.first_divergence == index


def test_flipped_bit_in_zkp(p256_zkp):
    tr, _ = run_zkp(p256_zkp, SA, SB)
    for i in (1, 2, 3):
        assert transcript_replay(flip_bit(tr, i, 3)).first_divergence == i


def test_missing_or_extra_entries(p256):
    tr, _ = run_kex(p256, SA, SB)
    short = Transcript(tr.params, tr.entries[:-1])
    report = transcript_replay(short)
    assert not report.matched and report.first_divergence == 2
    longer = Transcript(tr.params, tr.entries + [tr.entries[-1]])
    assert transcript_replay(longer).first_divergence == 3


def test_empty_transcript_matches(p256):
    report = transcript_replay(Transcript(p256))
    assert report.matched and report.checked == 0


def test_malformed(p256):
    tr, _ = run_kex(p256, SA, SB)
    with pytest.raises(CodecError):
        transcript_replay(Transcript(tr.params, tr.entries[1:]))
    data = tr.to_bytes()
    with pytest.raises(CodecError):
        Transcript.from_bytes(data[:-3])
    hdr = len(data) - sum(1 + len(e.record) for e in tr.entries)
    with pytest.raises(CodecError, match="direction"):
        Transcript.from_bytes(data[:hdr] + b"\x07" + data[hdr + 1 :])


def test_save_load(tmp_path, p256):
    tr, _ = run_ot(p256, SA, SB, 2, 2)
    path = tmp_path / "s.pcpt"
    tr.save(path)
    assert Transcript.load(path) == tr
    assert Transcript.load(path).values(Kind.OT_RESPONSE)[0].masked


def test_toy_params_session():
    p = make_params(4, 17, 1.0)
    tr, _ = run_kex(p, SA, SB)
    assert transcript_replay(tr).matched
