"""Interactive proof of knowledge of s behind b = a*s + e.

    prover:   c = a*r + t*m + e'          sends (a, b, m, c)
    verifier: u <- X                       sends u
    prover:   x = r + s*u                  sends x
    verifier: accept iff round_to_binary(c - a*x + b*u) == m

For an honest prover c - a*x + b*u = t*m + e' + e*u, so completeness
depends on the e*u term staying below the rounding margin.
``completeness_check`` estimates that failure rate for a parameter set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import pkc
from .multiplier import Multiplier, resolve
from .ring import BinaryVector, ParamSet, RingElement, lift_binary, round_to_binary
from .sampler import Drbg, sample_binary, sample_gaussian, sample_uniform

FAILURE_TARGET = 2.0**-20


class CompletenessWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ZkpStatement:
    a: RingElement
    b: RingElement
    m: BinaryVector
    c: RingElement

    @property
    def params(self) -> ParamSet:
        return self.a.params


@dataclass(frozen=True)
class ZkpWitness:
    s: RingElement
    r: RingElement
    e_prime: RingElement


@dataclass(frozen=True)
class ZkpChallenge:
    u: RingElement


@dataclass(frozen=True)
class ZkpResponse:
    x: RingElement


@dataclass(frozen=True)
class CompletenessReport:
    trials: int
    bound: int
    max_noise: int
    failures: int
    coeff_std: float
    est_failure_prob: float

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.est_failure_prob <= FAILURE_TARGET


def completeness_check(
    params: ParamSet, trials: int = 10_000, seed: bytes = bytes(32), backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> CompletenessReport:
    """Monte Carlo estimate of Pr[|e' + e*u|_inf >= q/4 - 1] for honest runs.

    Besides counting observed failures, the per-coefficient spread is fitted
    with a normal tail and union-bounded over n coefficients, since 10^4
    trials cannot resolve probabilities near 2^-20 directly.
    """
    rng = Drbg(seed)
    mul = resolve(backend, params)
    bound = params.noise_bound
    worst, failures = 0, 0
    sq_sum, count = 0.0, 0
    for _ in range(trials):
        e = sample_gaussian(params, rng)
        u = sample_gaussian(params, rng)
        e_prime = sample_gaussian(params, rng)
        c = (e_prime + mul(e, u)).centered()
        peak = int(np.abs(c).max())
        worst = max(worst, peak)
        failures += peak >= bound
        sq_sum += float((c.astype(float) ** 2).sum())
        count += c.size
    std = math.sqrt(sq_sum / count)
    est = min(1.0, params.n * math.erfc(bound / (std * math.sqrt(2)))) if std > 0 else 0.0
    report = CompletenessReport(trials, bound, worst, failures, std, est)
    if not report.ok:
        warnings.warn(
            f"honest ZKP runs may fail at n={params.n}, q={params.q}, sigma={params.sigma}: "
            f"{failures}/{trials} observed failures, estimated rate {est:.3g}",
            CompletenessWarning,
            stacklevel=2,
        )
    return report


@lru_cache(maxsize=None)
def _cached_check(params: ParamSet) -> CompletenessReport:
    return completeness_check(params)


def zkp_commit(
    s: RingElement,
    params: ParamSet,
    rng: Drbg | None,
    backend: str | Multiplier = pkc.DEFAULT_BACKEND,
    *,
    check_params: bool = False,
    a: RingElement | None = None,
    e: RingElement | None = None,
    m: BinaryVector | None = None,
    r: RingElement | None = None,
    e_prime: RingElement | None = None,
) -> tuple[ZkpStatement, ZkpWitness]:
    if check_params:
        _cached_check(params)
    mul = resolve(backend, params)
    if a is None:
        a = sample_uniform(params, rng)
    if e is None:
        e = sample_gaussian(params, rng)
    if m is None:
        m = sample_binary(params, rng)
    if r is None:
        r = sample_gaussian(params, rng)
    if e_prime is None:
        e_prime = sample_gaussian(params, rng)
    b = mul(a, s) + e
    c = mul(a, r) + lift_binary(m, params) + e_prime
    return ZkpStatement(a, b, m, c), ZkpWitness(s, r, e_prime)


def zkp_challenge(params: ParamSet, rng: Drbg) -> ZkpChallenge:
    return ZkpChallenge(sample_gaussian(params, rng))


def zkp_respond(
    witness: ZkpWitness, challenge: ZkpChallenge, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> ZkpResponse:
    mul = resolve(backend, witness.s.params)
    return ZkpResponse(witness.r + mul(witness.s, challenge.u))


def forge_response(params: ParamSet, rng: Drbg) -> ZkpResponse:
    """A response from a prover who does not know s: uniform x."""
    return ZkpResponse(sample_uniform(params, rng))


def verification_residual(
    stmt: ZkpStatement, challenge: ZkpChallenge, response: ZkpResponse, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> RingElement:
    mul = resolve(backend, stmt.params)
    return stmt.c - mul(stmt.a, response.x) + mul(stmt.b, challenge.u)


def zkp_verify(
    stmt: ZkpStatement, challenge: ZkpChallenge, response: ZkpResponse, backend: str | Multiplier = pkc.DEFAULT_BACKEND
) -> bool:
    return round_to_binary(verification_residual(stmt, challenge, response, backend)) == stmt.m
