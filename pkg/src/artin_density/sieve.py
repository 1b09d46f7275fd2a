"""Counting primes with prescribed primitive roots, for comparison with predicted densities.

Primes come from an odd-only segmented sieve.  Inside each segment the
numbers ``q - 1`` are factored by trial division over the primes up to
``sqrt(X)`` (vectorised over the whole segment; whatever cofactor survives is
prime), and the order conditions are checked with vectorised modular
exponentiation.  :func:`predicate` does the same test one prime at a time in
plain Python and serves as a reference.
"""
from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .density.problem import Kind, ProblemSpec
from .qgroups import factor_int, is_prime, parse_rational

MAX_BOUND = 10**9
DEFAULT_SEGMENT = 1 << 20
MAX_SEGMENT = 1 << 27


class SieveBudgetError(ValueError):
    """Requested bound or segmentation exceeds the memory budget."""


def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            block = spf[p::p]
            block[block == 0] = p
    return spf


@dataclass
class SieveTable:
    """The primes up to ``bound``, produced segment by segment."""

    bound: int
    segment_size: int
    spf: np.ndarray = field(repr=False)

    @property
    def base_primes(self) -> np.ndarray:
        n = np.arange(len(self.spf))
        return n[(self.spf == n) & (n >= 2)]

    def segments(self) -> List[Tuple[int, int]]:
        """Half-open ranges ``[lo, hi)`` covering ``[2, bound]``."""
        out, lo = [], 2
        while lo <= self.bound:
            hi = min(lo + self.segment_size, self.bound + 1)
            out.append((lo, hi))
            lo = hi
        return out

    def segment_primes(self, lo: int, hi: int) -> np.ndarray:
        """Primes in ``[lo, hi)`` as a sorted ``uint64`` array."""
        start = lo | 1  # first odd number >= lo
        count = max(0, (hi - start + 1) // 2)
        mask = np.ones(count, dtype=bool)
        for p in self.base_primes[1:].tolist():
            if p * p >= hi:
                break
            first = max(p * p, -(-start // p) * p)
            if first % 2 == 0:
                first += p
            if first < hi:
                mask[(first - start) // 2 :: p] = False
        odd = start + 2 * np.flatnonzero(mask).astype(np.uint64)
        if start == 1 and count:
            odd = odd[1:]  # 1 is not prime
        if lo <= 2 < hi:
            odd = np.concatenate([np.array([2], dtype=np.uint64), odd])
        return odd.astype(np.uint64)

    def __iter__(self) -> Iterator[int]:
        for lo, hi in self.segments():
            yield from self.segment_primes(lo, hi).tolist()

    def count(self) -> int:
        return sum(len(self.segment_primes(lo, hi)) for lo, hi in self.segments())


def primes_up_to(bound: int, segment_size: int = DEFAULT_SEGMENT, ceiling: int = MAX_BOUND) -> SieveTable:
    if bound < 2:
        raise ValueError("bound must be at least 2")
    if bound > ceiling:
        raise SieveBudgetError(f"bound {bound} exceeds the ceiling {ceiling}")
    if segment_size < 16:
        raise ValueError("segment size too small")
    if segment_size > MAX_SEGMENT:
        raise SieveBudgetError(f"segment size {segment_size} exceeds {MAX_SEGMENT}")
    return SieveTable(bound, segment_size, _spf_table(math.isqrt(bound)))


# --------------------------------------------------------------------------
# scalar reference predicates
# --------------------------------------------------------------------------

def _reduce(x: Fraction, q: int) -> Optional[int]:
    if x.numerator % q == 0 or x.denominator % q == 0:
        return None
    return x.numerator * pow(x.denominator, -1, q) % q


def is_primitive_root(a, q: int) -> Optional[bool]:
    """Whether ``a`` generates ``F_q^*``; ``None`` when ``q`` divides ``a``'s numerator or denominator."""
    q = int(q)
    if q < 2 or not is_prime(q):
        raise ValueError(f"{q} is not prime")
    r = _reduce(parse_rational(a), q)
    if r is None:
        return None
    return all(pow(r, (q - 1) // ell, q) != 1 for ell in factor_int(q - 1))


def _support(problem: ProblemSpec) -> set:
    return set(problem.lattice.primes)


def predicate(problem: ProblemSpec, q: int) -> Optional[bool]:
    """Whether the prime ``q`` is counted by ``problem``; ``None`` if ``q`` is not eligible."""
    q = int(q)
    if q == 2 or q in _support(problem):
        return None
    residues = [_reduce(g, q) for g in problem.gens]
    ells = list(factor_int(q - 1))
    if problem.kind is Kind.RANK_R:
        return all(any(pow(r, (q - 1) // ell, q) != 1 for r in residues) for ell in ells)
    ok = all(
        pow(residues[i], (q - 1) // ell, q) != 1 for i in problem.marked for ell in ells
    )
    for i in problem.split:
        ok = ok and pow(residues[i], (q - 1) // 2, q) == 1
    return ok


# --------------------------------------------------------------------------
# vectorised segment counts
# --------------------------------------------------------------------------

def _powmod(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Elementwise ``base**exp % mod`` for ``mod < 2**32``."""
    result = np.ones_like(mod)
    b = base % mod
    e = exp.copy()
    while True:
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * b % mod, result)
        e >>= np.uint64(1)
        if not e.any():
            return result
        b = b * b % mod


def _residues(n: int, q: np.ndarray) -> np.ndarray:
    """``n mod q`` elementwise, for integers of any size (Horner in base ``2**30``)."""
    digits = []
    m = abs(n)
    while m:
        digits.append(m & ((1 << 30) - 1))
        m >>= 30
    r = np.zeros_like(q)
    for d in reversed(digits):
        r = (r * np.uint64(1 << 30) + np.uint64(d)) % q
    if n < 0:
        r = (q - r) % q
    return r


@dataclass(frozen=True)
class _Plan:
    kind: Kind
    gens: Tuple[Fraction, ...]
    marked: Tuple[int, ...]
    split: Tuple[int, ...]
    support: Tuple[int, ...]


def _segment_count(table: SieveTable, plan: _Plan, lo: int, hi: int) -> Tuple[int, int]:
    q = table.segment_primes(lo, hi)
    keep = q != 2
    for p in plan.support:
        keep &= q != np.uint64(p)
    q = q[keep]
    if q.size == 0:
        return 0, 0
    m = q - np.uint64(1)
    nums = [_residues(g.numerator, q) for g in plan.gens]
    dens = [None if g.denominator == 1 else _residues(g.denominator, q) for g in plan.gens]
    checked = range(len(plan.gens)) if plan.kind is Kind.RANK_R else plan.marked
    ok = np.ones(q.size, dtype=bool)

    def apply(idx: np.ndarray, ell) -> None:
        if not checked:
            return
        qq = q[idx]
        e = m[idx] // ell
        moved = []
        for i in checked:
            lhs = _powmod(nums[i][idx], e, qq)
            rhs = np.ones_like(qq) if dens[i] is None else _powmod(dens[i][idx], e, qq)
            moved.append(lhs != rhs)
        if plan.kind is Kind.RANK_R:
            ok[idx] &= np.logical_or.reduce(moved)
        else:
            ok[idx] &= np.logical_and.reduce(moved)

    rest = m.copy()
    for ell in table.base_primes.tolist():
        ell_u = np.uint64(ell)
        idx = np.flatnonzero(rest % ell_u == 0)
        if idx.size == 0:
            continue
        sub = idx
        while sub.size:
            rest[sub] //= ell_u
            sub = sub[rest[sub] % ell_u == 0]
        idx = idx[ok[idx]]
        if idx.size:
            apply(idx, ell_u)
    idx = np.flatnonzero((rest > 1) & ok)
    if idx.size:
        apply(idx, rest[idx])

    for i in plan.split:
        half = m // np.uint64(2)
        ok &= _powmod(nums[i], half, q) == 1
    return int(q.size), int(ok.sum())


@dataclass(frozen=True)
class EmpiricalReport:
    bound: int
    eligible: int
    qualifying: int
    predicted: Optional[float] = None
    note: str = (
        "heuristic comparison: predicted densities are conditional on GRH and "
        "finite-range frequencies converge slowly"
    )

    @property
    def observed(self) -> float:
        return self.qualifying / self.eligible if self.eligible else 0.0

    @property
    def deviation(self) -> Optional[float]:
        return None if self.predicted is None else self.observed - self.predicted

    @property
    def scale(self) -> float:
        """Rough sampling scale ``1/sqrt(eligible)``."""
        return 1 / math.sqrt(self.eligible) if self.eligible else math.inf

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "eligible": self.eligible,
            "qualifying": self.qualifying,
            "observed": self.observed,
            "predicted": self.predicted,
            "deviation": self.deviation,
            "scale": self.scale,
            "note": self.note,
        }


def count_qualifying(
    problem: ProblemSpec,
    bound: int,
    threads: int = 1,
    segment_size: int = DEFAULT_SEGMENT,
    progress: bool = False,
) -> Tuple[int, int]:
    """``(eligible, qualifying)`` over the primes up to ``bound``."""
    table = primes_up_to(bound, segment_size)
    plan = _Plan(problem.kind, problem.gens, problem.marked, problem.split, tuple(sorted(_support(problem))))
    segs = table.segments()

    def work(seg):
        return _segment_count(table, plan, *seg)

    eligible = qualifying = 0
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for k, (e, c) in enumerate(pool.map(work, segs), 1):
            eligible += e
            qualifying += c
            if progress:
                print(f"sieve: segment {k}/{len(segs)}, {eligible} primes tested", file=sys.stderr)
    return eligible, qualifying


def empirical_density(
    problem: ProblemSpec,
    bound: int,
    threads: int = 1,
    segment_size: int = DEFAULT_SEGMENT,
    progress: bool = False,
    predicted: Optional[float] = None,
    digits: int = 20,
) -> EmpiricalReport:
    """Observed frequency of ``problem`` among primes up to ``bound``, next to the predicted density."""
    eligible, qualifying = count_qualifying(problem, bound, threads, segment_size, progress)
    if predicted is None:
        from .density.report import total_density

        predicted = float(total_density(problem, digits).total)
    return EmpiricalReport(bound, eligible, qualifying, predicted)
