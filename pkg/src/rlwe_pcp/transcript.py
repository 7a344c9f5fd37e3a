"""Seeded two-party sessions, their transcripts, and byte-exact replay.

A transcript file (``.pcpt``) is a ParamSet record followed by entries of
``direction u8 || record``.  The first entry is always a local Session
record holding both parties' seeds, so replay can re-run the protocol and
compare every later entry byte for byte.

Directions: 0x00 local (inputs, secrets), 0x01 party A -> B, 0x02 B -> A.
Party A is the KEX initiator, the OT sender, or the ZKP prover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import kex, ot, pkc, zkp
from .codec import (
    FLAG_FORGE,
    FLAG_INSECURE,
    CodecError,
    Kind,
    Protocol,
    Session,
    decode,
    encode,
    read_frame,
)
from .multiplier import Multiplier
from .pkc import SecretKey
from .ring import BinaryVector, ParamSet
from .sampler import Drbg, sample_binary, sample_gaussian

LOCAL, A_TO_B, B_TO_A = 0x00, 0x01, 0x02
FLAG_GIVEN_MESSAGES = 0x04
_DIRECTIONS = (LOCAL, A_TO_B, B_TO_A)


@dataclass(frozen=True)
class Entry:
    direction: int
    record: bytes

    @property
    def kind(self) -> Kind:
        return read_frame(self.record)[0]


@dataclass
class Transcript:
    params: ParamSet
    entries: list[Entry] = field(default_factory=list)

    def append(self, direction: int, value) -> None:
        self.entries.append(Entry(direction, encode(value, self.params)))

    def to_bytes(self) -> bytes:
        out = [encode(self.params)]
        for e in self.entries:
            out.append(bytes([e.direction]) + e.record)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Transcript":
        _, _, pos = read_frame(data, 0)
        params = decode(data[:pos], Kind.PARAMS)
        entries = []
        while pos < len(data):
            direction = data[pos]
            if direction not in _DIRECTIONS:
                raise CodecError(f"bad direction tag 0x{direction:02x} at offset {pos}")
            _, _, end = read_frame(data, pos + 1)
            entries.append(Entry(direction, bytes(data[pos + 1 : end])))
            pos = end
        return cls(params, entries)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Transcript":
        return cls.from_bytes(Path(path).read_bytes())

    def session(self) -> Session:
        if not self.entries or self.entries[0].direction != LOCAL:
            raise CodecError("transcript does not start with a local session record")
        return decode(self.entries[0].record, Kind.SESSION)

    def values(self, kind: Kind) -> list:
        """Decode every entry of ``kind`` in order."""
        return [decode(e.record, kind, self.params) for e in self.entries if e.kind == kind]


# --- sessions ---------------------------------------------------------------


@dataclass(frozen=True)
class KexOutcome:
    initiator: kex.SharedSecret
    responder: kex.SharedSecret

    @property
    def ok(self) -> bool:
        return self.initiator.raw == self.responder.raw


@dataclass(frozen=True)
class OtOutcome:
    choice: int
    messages: tuple[BinaryVector, ...]
    recovered: BinaryVector
    unchosen_weights: list[int]

    @property
    def ok(self) -> bool:
        return self.recovered == self.messages[self.choice - 1]


@dataclass(frozen=True)
class ZkpOutcome:
    accepted: bool
    forged: bool

    @property
    def ok(self) -> bool:
        return self.accepted


def run_kex(
    params: ParamSet,
    seed_a: bytes,
    seed_b: bytes,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    insecure: bool = False,
) -> tuple[Transcript, KexOutcome]:
    tr = Transcript(params)
    tr.append(LOCAL, Session(Protocol.KEX, seed_a, seed_b, FLAG_INSECURE if insecure else 0))
    pk, sk = kex.kex_initiate(params, Drbg(seed_a), backend)
    tr.append(A_TO_B, pk)
    ct, theirs = kex.kex_respond(pk, Drbg(seed_b), backend)
    tr.append(B_TO_A, ct)
    ours = kex.kex_finalize(sk, ct, backend)
    if insecure:
        tr.append(LOCAL, sk)
    return tr, KexOutcome(ours, theirs)


def random_ot_messages(params: ParamSet, seed_a: bytes, l: int) -> list[BinaryVector]:
    rng = Drbg(seed_a).fork("ot-messages")
    return [sample_binary(params, rng) for _ in range(l)]


def run_ot(
    params: ParamSet,
    seed_a: bytes,
    seed_b: bytes,
    l: int,
    choice: int,
    messages=None,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    insecure: bool = False,
) -> tuple[Transcript, OtOutcome]:
    flags = FLAG_INSECURE if insecure else 0
    if messages is None:
        messages = random_ot_messages(params, seed_a, l)
    else:
        flags |= FLAG_GIVEN_MESSAGES
    messages = tuple(messages)
    if len(messages) != l:
        raise ot.OtError(f"expected {l} messages, got {len(messages)}")
    if not 1 <= choice <= l:
        raise ot.OtError(f"choice {choice} outside [1, {l}]")

    tr = Transcript(params)
    tr.append(LOCAL, Session(Protocol.OT, seed_a, seed_b, flags, l, choice))
    for m in messages:
        tr.append(LOCAL, m)
    sender, offer = ot.ot_sender_setup(messages, params, Drbg(seed_a), backend)
    tr.append(A_TO_B, offer.pk)
    for r in offer.masks:
        tr.append(A_TO_B, r)
    receiver, req = ot.ot_receiver_choose(choice, offer.masks, offer.pk, Drbg(seed_b), backend)
    tr.append(B_TO_A, req)
    resp = ot.ot_sender_respond(sender, req)
    tr.append(A_TO_B, resp)
    got = ot.ot_receiver_finish(receiver, resp)
    if insecure:
        tr.append(LOCAL, sender.sk)
    return tr, OtOutcome(choice, messages, got, ot.unchosen_weights(receiver, resp))


def run_zkp(
    params: ParamSet,
    seed_prover: bytes,
    seed_verifier: bytes,
    forge: bool = False,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    insecure: bool = False,
) -> tuple[Transcript, ZkpOutcome]:
    flags = (FLAG_FORGE if forge else 0) | (FLAG_INSECURE if insecure else 0)
    tr = Transcript(params)
    tr.append(LOCAL, Session(Protocol.ZKP, seed_prover, seed_verifier, flags))
    prover_rng, verifier_rng = Drbg(seed_prover), Drbg(seed_verifier)
    s = sample_gaussian(params, prover_rng)
    stmt, witness = zkp.zkp_commit(s, params, prover_rng, backend)
    tr.append(A_TO_B, stmt)
    challenge = zkp.zkp_challenge(params, verifier_rng)
    tr.append(B_TO_A, challenge)
    if forge:
        response = zkp.forge_response(params, prover_rng)
    else:
        response = zkp.zkp_respond(witness, challenge, backend)
    tr.append(A_TO_B, response)
    accepted = zkp.zkp_verify(stmt, challenge, response, backend)
    if insecure:
        tr.append(LOCAL, SecretKey(s))
    return tr, ZkpOutcome(accepted, forge)


# --- replay -----------------------------------------------------------------


@dataclass(frozen=True)
class ReplayReport:
    matched: bool
    checked: int
    first_divergence: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        if self.matched:
            return f"replay OK: {self.checked} entries match"
        return f"replay DIVERGED at entry {self.first_divergence}: {self.detail}"


def _rerun(tr: Transcript, session: Session) -> Transcript:
    insecure = bool(session.flags & FLAG_INSECURE)
    if session.protocol == Protocol.KEX:
        return run_kex(tr.params, session.seed_a, session.seed_b, insecure=insecure)[0]
    if session.protocol == Protocol.ZKP:
        forge = bool(session.flags & FLAG_FORGE)
        return run_zkp(tr.params, session.seed_a, session.seed_b, forge, insecure=insecure)[0]
    messages = None
    if session.flags & FLAG_GIVEN_MESSAGES:
        inputs = tr.entries[1 : 1 + session.l]
        if len(inputs) != session.l or any(e.direction != LOCAL or e.kind != Kind.BITS for e in inputs):
            raise CodecError("OT transcript is missing its sender message records")
        messages = [decode(e.record, Kind.BITS, tr.params) for e in inputs]
    return run_ot(
        tr.params, session.seed_a, session.seed_b, session.l, session.choice, messages, insecure=insecure
    )[0]


def transcript_replay(tr: Transcript) -> ReplayReport:
    """Re-execute both parties from the recorded seeds and compare every entry."""
    if not tr.entries:
        return ReplayReport(True, 0)
    session = tr.session()
    try:
        expected = _rerun(tr, session)
    except ot.OtError as exc:
        raise CodecError(f"malformed transcript: {exc}") from None
    for i, (got, want) in enumerate(zip(tr.entries, expected.entries)):
        if got != want:
            what = "direction" if got.direction != want.direction else "record bytes"
            return ReplayReport(False, i + 1, i, f"{what} differ ({want.kind.name} expected)")
    if len(tr.entries) != len(expected.entries):
        i = min(len(tr.entries), len(expected.entries))
        return ReplayReport(
            False, i, i, f"transcript has {len(tr.entries)} entries, replay produced {len(expected.entries)}"
        )
    return ReplayReport(True, len(tr.entries))
