"""Interchangeable negacyclic multipliers with modular-multiplication counting.

Three backends compute the same product in R_q:

* ``schoolbook`` -- direct convolution, n^2 coefficient products.
* ``ntt`` -- psi-weighted (negative wrapped) radix-2 NTT, O(n log n) products.
* ``parm`` -- a table of (j, k, sign) terms per output coefficient, built once
  per parameter set; every output coefficient is an independent sum of n
  signed products, so all n of them can be evaluated in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ring import ParamSet, RingElement, check_same_ring, schoolbook_mul


@dataclass
class OpCounter:
    modmul_count: int = 0
    modadd_count: int = 0

    def reset(self) -> None:
        self.modmul_count = 0
        self.modadd_count = 0


# --- NTT ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NttTables:
    params: ParamSet
    psi_powers: np.ndarray  # natural order, psi^i
    inv_psi_powers: np.ndarray  # psi^-i
    inv_scale: np.ndarray  # n^-1 * psi^-i, merged post-scaling of the inverse
    twiddles: np.ndarray  # stage-major: for half = 1, 2, ..., n/2 the powers w^k, k < half
    inv_twiddles: np.ndarray
    bitrev: np.ndarray


def _bitrev_perm(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _powers(base: int, count: int, q: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    x = 1
    for i in range(count):
        out[i] = x
        x = x * base % q
    return out


@lru_cache(maxsize=None)
def ntt_precompute(params: ParamSet) -> NttTables:
    n, q = params.n, params.q
    psi_inv = pow(params.psi, -1, q)
    omega_inv = pow(params.omega, -1, q)
    psi_pows = _powers(params.psi, n, q)
    inv_psi_pows = _powers(psi_inv, n, q)
    tw, itw = [], []
    half = 1
    while half < n:
        # w = primitive (2 half)-th root of unity
        step = n // (2 * half)
        tw.append(_powers(pow(params.omega, step, q), half, q))
        itw.append(_powers(pow(omega_inv, step, q), half, q))
        half *= 2
    tw, itw = np.concatenate(tw), np.concatenate(itw)
    inv_scale = inv_psi_pows * params.n_inv % q
    bitrev = _bitrev_perm(n)
    for arr in (psi_pows, inv_psi_pows, inv_scale, tw, itw, bitrev):
        arr.flags.writeable = False
    return NttTables(params, psi_pows, inv_psi_pows, inv_scale, tw, itw, bitrev)


def _butterflies_numpy(x: np.ndarray, twiddles: np.ndarray, q: int) -> np.ndarray:
    # iterative decimation-in-time on bit-reversed input, one vectorized pass per stage
    n = x.size
    half, off = 1, 0
    while half < n:
        blocks = x.reshape(-1, 2, half)
        u = blocks[:, 0, :]
        v = blocks[:, 1, :] * twiddles[off : off + half] % q
        x = np.concatenate(((u + v) % q, (u - v) % q), axis=1).reshape(n)
        off += half
        half *= 2
    return x


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

if numba is not None:

    @numba.njit(cache=True)
    def _butterflies_compiled(x, twiddles, q):
        x = x.copy()
        n = x.size
        half, off = 1, 0
        while half < n:
            for start in range(0, n, 2 * half):
                for k in range(half):
                    u = x[start + k]
                    v = x[start + k + half] * twiddles[off + k] % q
                    x[start + k] = (u + v) % q
                    x[start + k + half] = (u - v) % q
            off += half
            half *= 2
        return x

    _butterfly_kernel = _butterflies_compiled
else:  # pragma: no cover
    _butterfly_kernel = _butterflies_numpy


def _butterflies(x: np.ndarray, twiddles: np.ndarray, q: int, counter: OpCounter | None) -> np.ndarray:
    if counter is not None:
        stages = x.size.bit_length() - 1
        counter.modmul_count += stages * (x.size // 2)
        counter.modadd_count += stages * x.size
    return _butterfly_kernel(x, twiddles, q)


def _forward(a: np.ndarray, tables: NttTables, counter: OpCounter | None) -> np.ndarray:
    q = tables.params.q
    x = (a * tables.psi_powers % q)[tables.bitrev]
    if counter is not None:
        counter.modmul_count += a.size
    return _butterflies(x, tables.twiddles, q, counter)


def _inverse(ahat: np.ndarray, tables: NttTables, counter: OpCounter | None) -> np.ndarray:
    q = tables.params.q
    x = _butterflies(ahat[tables.bitrev], tables.inv_twiddles, q, counter)
    if counter is not None:
        counter.modmul_count += x.size
    return x * tables.inv_scale % q


def _check_tables(a: RingElement, tables: NttTables) -> None:
    if a.params.n != tables.params.n or a.params.q != tables.params.q:
        raise ValueError(
            f"element over (n={a.params.n}, q={a.params.q}) does not match "
            f"tables for (n={tables.params.n}, q={tables.params.q})"
        )


def ntt_forward(a: RingElement, tables: NttTables, counter: OpCounter | None = None) -> RingElement:
    """Return ahat with ahat_i = sum_j a_j psi^j omega^(ij), natural order."""
    _check_tables(a, tables)
    return RingElement._wrap(_forward(a.coeffs, tables, counter), a.params)


def ntt_inverse(ahat: RingElement, tables: NttTables, counter: OpCounter | None = None) -> RingElement:
    _check_tables(ahat, tables)
    return RingElement._wrap(_inverse(ahat.coeffs, tables, counter), ahat.params)


def ntt_mul(a: RingElement, b: RingElement, tables: NttTables, counter: OpCounter | None = None) -> RingElement:
    p = check_same_ring(a, b)
    _check_tables(a, tables)
    fa = _forward(a.coeffs, tables, counter)
    fb = _forward(b.coeffs, tables, counter)
    if counter is not None:
        counter.modmul_count += p.n
    return RingElement._wrap(_inverse(fa * fb % p.q, tables, counter), p)


# --- PARM -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParmTable:
    """Precomputed signed index terms of the reduced product.

    Row i of ``j``, ``k`` and ``sign`` lists the n triples with j + k = i mod n;
    sign is -1 exactly for the terms wrapped by x^n = -1.
    """

    params: ParamSet
    j: np.ndarray  # (n, n) int
    k: np.ndarray  # (n, n) int
    sign: np.ndarray  # (n, n) int8 in {+1, -1}

    @property
    def terms(self) -> list[list[tuple[int, int, int]]]:
        return [
            list(zip(self.j[i].tolist(), self.k[i].tolist(), self.sign[i].tolist()))
            for i in range(self.params.n)
        ]

    def __len__(self) -> int:
        return int(self.j.size)


@lru_cache(maxsize=None)
def parm_precompute(params: ParamSet) -> ParmTable:
    n = params.n
    idx_dtype = np.int16 if n <= 1 << 15 else np.int32
    i = np.arange(n).reshape(n, 1)
    j = np.broadcast_to(np.arange(n), (n, n))
    k = (i - j) % n
    sign = np.where(j + k < n, 1, -1).astype(np.int8)
    j = np.ascontiguousarray(j, dtype=idx_dtype)
    k = k.astype(idx_dtype)
    for arr in (j, k, sign):
        arr.flags.writeable = False
    return ParmTable(params, j, k, sign)


def _check_table(a: RingElement, table: ParmTable) -> None:
    if a.params.n != table.params.n or a.params.q != table.params.q:
        raise ValueError(
            f"element over (n={a.params.n}, q={a.params.q}) does not match "
            f"PARM table for (n={table.params.n}, q={table.params.q})"
        )


def parm_coefficient(i: int, a: RingElement, b: RingElement, table: ParmTable) -> int:
    """Evaluate output coefficient i alone from its row of the table."""
    q = table.params.q
    total = 0
    for j, k, s in zip(table.j[i].tolist(), table.k[i].tolist(), table.sign[i].tolist()):
        prod = int(a.coeffs[j]) * int(b.coeffs[k])
        total += prod if s > 0 else -prod
    return total % q


def parm_mul(a: RingElement, b: RingElement, table: ParmTable, counter: OpCounter | None = None) -> RingElement:
    p = check_same_ring(a, b)
    _check_table(a, table)
    prods = a.coeffs[table.j] * b.coeffs[table.k]
    signed = np.where(table.sign > 0, prods, -prods)
    if counter is not None:
        counter.modmul_count += prods.size
        counter.modadd_count += prods.size - p.n
    return RingElement._wrap(signed.sum(axis=1) % p.q, p)


# --- backend selection ----------------------------------------------------

BACKENDS = ("schoolbook", "ntt", "parm")


class Multiplier:
    """A backend bound to one parameter set."""

    name: str = ""

    def __init__(self, params: ParamSet):
        self.params = params

    def mul(self, a: RingElement, b: RingElement, counter: OpCounter | None = None) -> RingElement:
        raise NotImplementedError

    def __call__(self, a: RingElement, b: RingElement) -> RingElement:
        return self.mul(a, b)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.params.n}, q={self.params.q})"


class SchoolbookMultiplier(Multiplier):
    name = "schoolbook"

    def mul(self, a, b, counter=None):
        c = schoolbook_mul(a, b)
        if counter is not None:
            n = c.params.n
            counter.modmul_count += n * n
            counter.modadd_count += n * (n - 1)
        return c


class NttMultiplier(Multiplier):
    name = "ntt"

    def __init__(self, params):
        super().__init__(params)
        self.tables = ntt_precompute(params)

    def mul(self, a, b, counter=None):
        return ntt_mul(a, b, self.tables, counter)


class ParmMultiplier(Multiplier):
    name = "parm"

    def __init__(self, params):
        super().__init__(params)
        self.table = parm_precompute(params)

    def mul(self, a, b, counter=None):
        return parm_mul(a, b, self.table, counter)


_CLASSES = {cls.name: cls for cls in (SchoolbookMultiplier, NttMultiplier, ParmMultiplier)}


@lru_cache(maxsize=None)
def get_multiplier(name: str, params: ParamSet) -> Multiplier:
    try:
        cls = _CLASSES[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}") from None
    return cls(params)


def resolve(backend: str | Multiplier, params: ParamSet) -> Multiplier:
    """Accept a backend name or an instance and return a bound Multiplier."""
    if isinstance(backend, Multiplier):
        if backend.params.n != params.n or backend.params.q != params.q:
            raise ValueError(f"{backend!r} does not match (n={params.n}, q={params.q})")
        return backend
    return get_multiplier(backend, params)


def count_ops(backend: str | Multiplier, a: RingElement, b: RingElement) -> OpCounter:
    """Run one product through ``backend`` and return its operation counts."""
    counter = OpCounter()
    resolve(backend, a.params).mul(a, b, counter)
    return counter
