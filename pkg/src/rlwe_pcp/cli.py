"""Command-line interface.

Exit codes: 0 success, 1 verification or protocol failure, 2 usage or
parameter error.
"""

from __future__ import annotations

import argparse
import hashlib
import secrets
import sys
from pathlib import Path

import numpy as np

from . import bench, pkc
from .codec import CodecError, Kind, decode_stream, encode
from .multiplier import BACKENDS
from .ot import OtError
from .ring import PRESETS, ZKP_PRESET, BinaryVector, ParamError, ParamSet, make_params, preset
from .sampler import Drbg
from .transcript import LOCAL, A_TO_B, Transcript, run_kex, run_ot, run_zkp, transcript_replay


class UsageError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


# --- helpers ----------------------------------------------------------------


def parse_seed(text: str | None, label: str = "seed") -> bytes:
    if text is None:
        seed = secrets.token_bytes(32)
        print(f"{label}: {seed.hex()}", file=sys.stderr)
        return seed
    try:
        return Drbg.from_hex(text).seed
    except ValueError as exc:
        raise UsageError(f"--{label}: {exc}") from None


def message_from_hex(text: str, n: int) -> BinaryVector:
    """Parse ceil(n/4) hex digits of LSB-first packed bits."""
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    want = -(-n // 4)
    if len(text) != want:
        raise UsageError(f"message must be {want} hex digits ({n} bits), got {len(text)}")
    if len(text) % 2:
        text = text[:-1] + "0" + text[-1]
    try:
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    except ValueError:
        raise UsageError(f"message is not hex: {text!r}") from None
    bits = np.unpackbits(raw, bitorder="little")
    if bits[n:].any():
        raise UsageError(f"message has bits set beyond bit {n - 1}")
    return BinaryVector(bits[:n])


def message_to_hex(m: BinaryVector) -> str:
    h = np.packbits(m.bits, bitorder="little").tobytes().hex()
    want = -(-m.n // 4)
    if len(h) > want:  # trailing half byte
        h = h[:-2] + h[-1]
    return h


def params_from_args(args, fallback: ParamSet | None = None) -> ParamSet:
    try:
        if args.n is not None or args.q is not None or args.sigma is not None:
            if args.params:
                raise UsageError("use either --params or --n/--q/--sigma, not both")
            if None in (args.n, args.q, args.sigma):
                raise UsageError("--n, --q and --sigma must be given together")
            return make_params(args.n, args.q, args.sigma)
        if args.params:
            return preset(args.params)
    except ParamError as exc:
        raise UsageError(str(exc)) from None
    return fallback or preset("n256")


def write_records(path, params: ParamSet, value) -> None:
    Path(path).write_bytes(encode(params) + encode(value, params))


def read_records(path, kind: Kind):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        params, pos = decode_stream(data, Kind.PARAMS, None)
        value, end = decode_stream(data, kind, params, pos)
    except CodecError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if end != len(data):
        raise UsageError(f"{path}: trailing bytes")
    return params, value


def describe(tr: Transcript) -> str:
    arrows = {LOCAL: "local ", A_TO_B: "A -> B", 0x02: "B -> A"}
    lines = [f"params n={tr.params.n} q={tr.params.q} sigma={tr.params.sigma}"]
    for i, e in enumerate(tr.entries):
        digest = hashlib.sha256(e.record).hexdigest()[:16]
        lines.append(f"  [{i}] {arrows[e.direction]} {e.kind.name:<13} {len(e.record):>6} B  sha256:{digest}")
    return "\n".join(lines)


def save_transcript(tr: Transcript, path) -> None:
    if path:
        tr.save(path)
        print(f"transcript: {path} ({len(tr.to_bytes())} bytes)")


# --- commands ---------------------------------------------------------------


def cmd_keygen(args) -> int:
    params = params_from_args(args)
    pk, sk = pkc.keygen(params, Drbg(parse_seed(args.seed)), args.backend)
    out = Path(args.out)
    write_records(out.with_name(out.name + ".pub"), params, pk)
    write_records(out.with_name(out.name + ".sec"), params, sk)
    print(f"wrote {out}.pub and {out}.sec (n={params.n}, q={params.q})")
    return 0


def cmd_enc(args) -> int:
    params, pk = read_records(args.pk, Kind.PUBLIC_KEY)
    m = message_from_hex(args.message, params.n)
    ct = pkc.encrypt(pk, m, Drbg(parse_seed(args.seed)), args.backend)
    write_records(args.out, params, ct)
    print(f"wrote {args.out}")
    return 0


def cmd_dec(args) -> int:
    params, sk = read_records(args.sk, Kind.SECRET_KEY)
    ct_params, ct = read_records(args.ct, Kind.CIPHERTEXT)
    if (ct_params.n, ct_params.q) != (params.n, params.q):
        raise UsageError("ciphertext and secret key use different parameters")
    print(message_to_hex(pkc.decrypt(sk, ct, args.backend)))
    return 0


def _read_messages(source: str, params: ParamSet, l: int):
    if source == "random":
        return None
    try:
        lines = [ln.strip() for ln in Path(source).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if len(lines) != l:
        raise UsageError(f"{source}: expected {l} messages, found {len(lines)}")
    return [message_from_hex(ln, params.n) for ln in lines]


def cmd_ot_run(args) -> int:
    params = params_from_args(args)
    if args.l < 1:
        raise UsageError("--l must be at least 1")
    if not 1 <= args.choice <= args.l:
        raise UsageError(f"--choice must be in [1, {args.l}]")
    messages = _read_messages(args.messages, params, args.l)
    seed_a = parse_seed(args.seed_a, "seed-a")
    seed_b = parse_seed(args.seed_b, "seed-b")
    tr, res = run_ot(params, seed_a, seed_b, args.l, args.choice, messages, args.backend, args.insecure_transcript)
    print(f"m_{res.choice} = {message_to_hex(res.recovered)}")
    print(f"matches sender's message {res.choice}: {'yes' if res.ok else 'NO'}")
    if res.unchosen_weights:
        w = np.array(res.unchosen_weights)
        print(
            f"unchosen m'_i xor K weights: mean {w.mean():.1f}, min {w.min()}, max {w.max()} "
            f"(uniform: {params.n / 2:.0f} +/- {np.sqrt(params.n) / 2:.1f})"
        )
    save_transcript(tr, args.transcript)
    return 0 if res.ok else 1


def cmd_zkp_run(args) -> int:
    params = params_from_args(args, make_params(*ZKP_PRESET))
    seed_p = parse_seed(args.seed_prover, "seed-prover")
    seed_v = parse_seed(args.seed_verifier, "seed-verifier")
    tr, res = run_zkp(params, seed_p, seed_v, args.forge, args.backend, args.insecure_transcript)
    print(describe(tr))
    print("ACCEPT" if res.accepted else "REJECT")
    save_transcript(tr, args.transcript)
    return 0 if res.accepted else 1


def cmd_kex_run(args) -> int:
    params = params_from_args(args)
    seed_a = parse_seed(args.seed_a, "seed-a")
    seed_b = parse_seed(args.seed_b, "seed-b")
    tr, res = run_kex(params, seed_a, seed_b, args.backend, args.insecure_transcript)
    print(f"initiator key: {res.initiator.key.hex()}")
    print(f"responder key: {res.responder.key.hex()}")
    print("AGREE" if res.ok else "MISMATCH")
    save_transcript(tr, args.transcript)
    return 0 if res.ok else 1


def cmd_replay(args) -> int:
    try:
        tr = Transcript.load(args.transcript)
        report = transcript_replay(tr)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except CodecError as exc:
        raise UsageError(f"{args.transcript}: {exc}") from None
    print(describe(tr))
    print(report)
    return 0 if report.matched else 1


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _backend_list(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    for name in names:
        if name not in BACKENDS:
            raise argparse.ArgumentTypeError(f"unknown backend {name!r}; choose from {','.join(BACKENDS)}")
    return names


def cmd_bench(args) -> int:
    for n in args.n:
        if n < 2 or n & (n - 1):
            raise UsageError(f"--n values must be powers of 2, got {n}")
    reports = bench.run_bench(args.backends, args.n, args.trials, args.seed)
    print(bench.format_table(reports))
    if args.csv == "-":
        bench.write_csv(reports, sys.stdout)
    elif args.csv:
        with open(args.csv, "w", newline="") as fh:
            bench.write_csv(reports, fh)
        print(f"csv: {args.csv}")
    return 0


# --- parser -----------------------------------------------------------------


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", choices=sorted(PRESETS), help="named parameter set")
    p.add_argument("--n", type=int, help="ring dimension (power of 2)")
    p.add_argument("--q", type=int, help="prime modulus, q = 1 mod 2n")
    p.add_argument("--sigma", type=float, help="Gaussian standard deviation")


def _add_backend(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=BACKENDS, default=pkc.DEFAULT_BACKEND)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcp", description="Ring-LWE PKC, KEX, OT and ZKP primitives")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    _add_params(p)
    _add_backend(p)
    p.add_argument("--seed", help="64 hex chars")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.pub and PREFIX.sec")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("enc", help="encrypt an n-bit message")
    _add_backend(p)
    p.add_argument("--pk", required=True)
    p.add_argument("--message", required=True, help="ceil(n/4) hex digits, bits packed LSB first")
    p.add_argument("--seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enc)

    p = sub.add_parser("dec", help="decrypt a ciphertext")
    _add_backend(p)
    p.add_argument("--sk", required=True)
    p.add_argument("--ct", required=True)
    p.set_defaults(func=cmd_dec)

    p = sub.add_parser("ot-run", help="run 1-out-of-l OT with both parties in-process")
    _add_params(p)
    _add_backend(p)
    p.add_argument("--l", type=int, default=8)
    p.add_argument("--choice", type=int, default=1, help="1-based index")
    p.add_argument("--seed-a", help="sender seed")
    p.add_argument("--seed-b", help="receiver seed")
    p.add_argument("--messages", default="random", help="file with one hex message per line, or 'random'")
    p.add_argument("--transcript")
    p.add_argument("--insecure-transcript", action="store_true", help="also record the secret key")
    p.set_defaults(func=cmd_ot_run)

    p = sub.add_parser("zkp-run", help="run one round of the proof of knowledge")
    _add_params(p)
    _add_backend(p)
    p.add_argument("--seed-prover")
    p.add_argument("--seed-verifier")
    p.add_argument("--forge", action="store_true", help="prover answers with a random x")
    p.add_argument("--transcript")
    p.add_argument("--insecure-transcript", action="store_true")
    p.set_defaults(func=cmd_zkp_run)

    p = sub.add_parser("kex-run", help="run a key exchange with both parties in-process")
    _add_params(p)
    _add_backend(p)
    p.add_argument("--seed-a")
    p.add_argument("--seed-b")
    p.add_argument("--transcript")
    p.add_argument("--insecure-transcript", action="store_true")
    p.set_defaults(func=cmd_kex_run)

    p = sub.add_parser("replay", help="re-execute a transcript and compare it byte for byte")
    p.add_argument("transcript")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="time and count ring multiplications")
    p.add_argument("--backends", type=_backend_list, default=list(BACKENDS))
    p.add_argument("--n", type=_int_list, default=[256, 1024])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write CSV here ('-' for stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OtError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
