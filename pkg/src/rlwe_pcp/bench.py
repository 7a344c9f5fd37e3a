"""Per-product latency and modular-multiplication counts for each backend."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from .multiplier import BACKENDS, count_ops, get_multiplier
from .ring import PRESETS, ParamSet, RingElement, is_prime, make_params

CSV_COLUMNS = ("backend", "n", "q", "trials", "modmul", "median_ns", "speedup")


@dataclass(frozen=True)
class BenchReport:
    backend: str
    n: int
    q: int
    trials: int
    modmul: int
    median_ns: int
    speedup: float  # schoolbook median / this backend's median


def params_for_n(n: int) -> ParamSet:
    """The shipped parameter set for ``n``, else the smallest prime q = 1 mod 2n."""
    for pn, q, sigma in PRESETS.values():
        if pn == n:
            return make_params(pn, q, sigma)
    q = 2 * n + 1
    while not is_prime(q):
        q += 2 * n
    return make_params(n, q, 3.0)


def _median_ns(backend: str, params: ParamSet, pairs) -> int:
    mul = get_multiplier(backend, params)
    mul.mul(*pairs[0])  # warm caches / JIT
    samples = []
    for a, b in pairs:
        t0 = time.perf_counter_ns()
        mul.mul(a, b)
        samples.append(time.perf_counter_ns() - t0)
    return int(statistics.median(samples))


def run_bench(backends=BACKENDS, ns=(256, 1024), trials: int = 20, seed: int = 0) -> list[BenchReport]:
    for name in backends:
        if name not in BACKENDS:
            raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    rng = np.random.default_rng(seed)
    reports = []
    for n in ns:
        params = params_for_n(n)
        pairs = [
            (
                RingElement._wrap(rng.integers(0, params.q, n), params),
                RingElement._wrap(rng.integers(0, params.q, n), params),
            )
            for _ in range(trials)
        ]
        baseline = _median_ns("schoolbook", params, pairs)
        for name in backends:
            med = baseline if name == "schoolbook" else _median_ns(name, params, pairs)
            ops = count_ops(name, *pairs[0])
            reports.append(
                BenchReport(name, n, params.q, trials, ops.modmul_count, med, baseline / max(med, 1))
            )
    return reports


def format_table(reports: list[BenchReport]) -> str:
    header = f"{'backend':<11} {'n':>5} {'q':>6} {'trials':>6} {'modmul':>9} {'median_ns':>11} {'speedup':>8}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.backend:<11} {r.n:>5} {r.q:>6} {r.trials:>6} {r.modmul:>9} {r.median_ns:>11} {r.speedup:>8.2f}"
        )
    return "\n".join(lines)


def write_csv(reports: list[BenchReport], fh) -> None:
    assert tuple(f.name for f in fields(BenchReport)) == CSV_COLUMNS
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        row = list(astuple(r))
        row[-1] = f"{r.speedup:.4f}"
        writer.writerow(row)
