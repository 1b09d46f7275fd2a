"""Independent checks of the density machinery.

``finite_model_oracle`` counts elements of a finite quotient of the Galois
group directly: the group is cut out of a product of local groups by the
quadratic characters ``chi_[b]``, and no local averages or closed forms are
used.  ``rank1_inclusion_exclusion`` sums the classical Möbius series for a
single generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath import mp, mpf

from ..constants import GUARD_DIGITS, HighPrecisionValue
from ..qgroups import (
    ExponentLattice,
    critical_primes,
    mod_p_image,
    squarefree_kernel,
)
from .local import sign_constraints
from .problem import Kind, ProblemSpec

DEFAULT_MODEL_BOUND = 10**7


class ModelTooLargeError(RuntimeError):
    """The requested finite model exceeds the configured size bound."""


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol ``(a/n)`` for odd positive ``n``."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol ``(d/n)`` for ``n > 0``."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    return result * jacobi(d, n) if n > 1 else result


# --------------------------------------------------------------------------
# local pieces of the model
# --------------------------------------------------------------------------

def _phi_values(lattice: ExponentLattice, p: int, indices: Sequence[int]):
    """For every homomorphism ``image mod p -> Z/p``, its values on the generators in ``indices``."""
    image = mod_p_image(lattice, p)
    coords = [image.coordinates(lattice.vector(i, p)) for i in indices]
    for phi in product(range(p), repeat=image.rank):
        yield tuple(sum(c * x for c, x in zip(phi, v)) % p for v in coords)


def kernel_union_count(lattice: ExponentLattice, marked: Iterable[int], p: int) -> int:
    """Homomorphisms ``image mod p -> mu_p`` trivial on at least one marked generator, by enumeration."""
    marked = list(marked)
    return sum(1 for vals in _phi_values(lattice, p, marked) if any(v == 0 for v in vals))


def _in_odd_local(problem: ProblemSpec, values: Tuple[int, ...], sigma: int) -> bool:
    """Whether ``(phi, sigma)`` lies in the good set at an odd prime.

    ``values`` holds ``phi`` on the marked generators, or on all generators
    for the rank-r problem.
    """
    if sigma != 1:
        return True
    if problem.kind is Kind.RANK_R:
        return any(values)
    return all(values)


def _odd_fibres(problem: ProblemSpec, p: int) -> Tuple[int, List[int]]:
    """Size of ``Hom(image, mu_p)`` and the number of good ``phi`` for each ``sigma``."""
    lattice = problem.lattice
    idx = range(len(lattice)) if problem.kind is Kind.RANK_R else problem.marked
    vals = list(_phi_values(lattice, p, list(idx)))
    good = [0] * p
    for sigma in range(1, p):
        good[sigma] = sum(1 for v in vals if _in_odd_local(problem, v, sigma))
    return len(vals), good


@dataclass(frozen=True)
class _TwoAdic:
    basis_discs: Tuple[int, ...]
    constraint_coords: Tuple[Tuple[Tuple[int, ...], int], ...]

    def in_good_set(self, eps: Sequence[int], rank_r: bool) -> bool:
        if rank_r:
            return any(eps)
        for coords, target in self.constraint_coords:
            bit = sum(e * c for e, c in zip(eps, coords)) % 2
            if (-1) ** bit != target:
                return False
        return True


def _two_adic(problem: ProblemSpec) -> _TwoAdic:
    lattice = problem.lattice
    image = mod_p_image(lattice, 2)
    basis = [lattice.class_of_vector(row) for row in image.basis]
    cons = []
    if problem.kind is not Kind.RANK_R:
        for cls, target in sign_constraints(problem):
            cons.append((image.coordinates(lattice.class_vector(cls.rep)), target))
    return _TwoAdic(tuple(b.disc for b in basis), tuple(cons))


def _check_primes(problem: ProblemSpec, primes: Optional[Iterable[int]]) -> Tuple[int, ...]:
    needed = set(critical_primes(problem.lattice))
    chosen = set(needed if primes is None else (int(p) for p in primes))
    missing = needed - chosen
    if missing:
        raise ValueError(f"the model must include the critical primes {sorted(missing)}")
    return tuple(sorted(chosen))


def _units(primes: Sequence[int]) -> Tuple[int, List[Tuple[int, ...]]]:
    """Modulus ``8 * prod(odd primes)`` and each unit with its local components."""
    odd = [p for p in primes if p != 2]
    modulus = 8 * math.prod(odd)
    units = []
    for n in range(1, modulus, 2):
        if all(n % p for p in odd):
            units.append((n,) + tuple(n % p for p in odd))
    return modulus, units


@dataclass(frozen=True)
class ModelCount:
    good: int
    group: int
    ambient: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.good, self.group)


def _model_sizes(problem: ProblemSpec, primes: Sequence[int]) -> Tuple[int, int]:
    """(order of the ambient group, work for the factored count)."""
    lattice = problem.lattice
    k = mod_p_image(lattice, 2).rank
    ambient = 2**k * 4
    fibres = 0
    units = 4
    for p in primes:
        if p == 2:
            continue
        size = mod_p_image(lattice, p).size
        ambient *= size * (p - 1)
        fibres += size * (p - 1)
        units *= p - 1
    return ambient, units * max(k, 1) + fibres + 2**k


def finite_model_count(
    problem: ProblemSpec,
    primes: Optional[Iterable[int]] = None,
    mode: str = "factored",
    bound: int = DEFAULT_MODEL_BOUND,
) -> ModelCount:
    """Count ``G`` and ``G ∩ S`` inside the finite model over ``primes``.

    ``mode="full"`` walks every element of the ambient product group.
    ``mode="factored"`` sums over the cyclotomic part only: for each unit
    ``n`` the characters force a unique sign vector at 2, and the
    homomorphism parts at odd primes contribute their fibre counts.
    """
    primes = _check_primes(problem, primes)
    ambient, work = _model_sizes(problem, primes)
    if mode == "full":
        if ambient > bound:
            raise ModelTooLargeError(f"model has {ambient} elements, bound is {bound}")
    elif mode == "factored":
        if work > bound:
            raise ModelTooLargeError(f"factored count needs {work} steps, bound is {bound}")
    else:
        raise ValueError(f"unknown mode {mode!r}")

    two = _two_adic(problem)
    rank_r = problem.kind is Kind.RANK_R
    k = len(two.basis_discs)
    odd = [p for p in primes if p != 2]
    _, units = _units(primes)
    kron_table = {u[0]: tuple(kronecker(d, u[0]) for d in two.basis_discs) for u in units}

    if mode == "factored":
        fibres = {p: _odd_fibres(problem, p) for p in odd}
        good = group = 0
        for u in units:
            eps = tuple(0 if v == 1 else 1 for v in kron_table[u[0]])
            weight_all = math.prod(fibres[p][0] for p in odd)
            group += weight_all
            if two.in_good_set(eps, rank_r):
                good += math.prod(fibres[p][1][s] for p, s in zip(odd, u[1:]))
        return ModelCount(good, group, ambient)

    idx = range(len(problem.lattice)) if rank_r else problem.marked
    phis = {p: list(_phi_values(problem.lattice, p, list(idx))) for p in odd}
    good = group = 0
    for eps in product((0, 1), repeat=k):
        in_two = two.in_good_set(eps, rank_r)
        for u in units:
            kr = kron_table[u[0]]
            in_g = all((-1) ** e * v == 1 for e, v in zip(eps, kr))
            for phi_tuple in product(*(phis[p] for p in odd)):
                if not in_g:
                    continue
                group += 1
                if in_two and all(
                    _in_odd_local(problem, vals, s) for vals, s in zip(phi_tuple, u[1:])
                ):
                    good += 1
    return ModelCount(good, group, ambient)


def finite_model_oracle(
    problem: ProblemSpec,
    primes: Optional[Iterable[int]] = None,
    mode: str = "factored",
    bound: int = DEFAULT_MODEL_BOUND,
) -> Fraction:
    """Density of ``S`` restricted to ``primes`` in the finite Galois model, as an exact rational."""
    return finite_model_count(problem, primes, mode, bound).density


# --------------------------------------------------------------------------
# Möbius series for one generator
# --------------------------------------------------------------------------

def _mobius_phi(limit: int) -> Tuple[np.ndarray, np.ndarray]:
    mu = np.ones(limit + 1, dtype=np.int8)
    phi = np.arange(limit + 1, dtype=np.int64)
    is_comp = np.zeros(limit + 1, dtype=bool)
    for p in range(2, limit + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
        phi[p::p] -= phi[p::p] // p
    mu[0] = 0
    return mu, phi


def _tail_bound(n0: int, extra: int) -> mpf:
    """Bound for ``sum_{n > n0} 2/(n phi(n))`` using ``n/phi(n) < e^g lnln n + 2.51/lnln n``."""
    start = max(n0, 100)
    head = mpf(0)
    if start > n0:
        _, phi = _mobius_phi(start)
        head = mpf(math.fsum(1.0 / (n * float(phi[n])) for n in range(n0 + 1, start + 1)))
    eg = mpmath.exp(mpmath.euler)

    def f(t):
        ll = mpmath.log(mpmath.log(t))
        return (eg * ll + mpf("2.51") / ll) / t**2

    return 2 * (head * (1 + mpf(2) ** -40) + mpmath.quad(f, [start, 10 * start, mpmath.inf])) + extra


def rank1_inclusion_exclusion(a: int, N: int, digits: int = 20) -> HighPrecisionValue:
    """``sum_{n <= N} mu(n) / [Q(zeta_n, a^{1/n}) : Q]`` for squarefree ``a > 1``, with a tail bound."""
    a = int(a)
    if a <= 1 or squarefree_kernel(a) != a:
        raise ValueError("a must be a squarefree integer greater than 1")
    if N < 1:
        raise ValueError("N must be positive")
    disc = a if a % 4 == 1 else 4 * a
    # sqrt(a) lies in Q(zeta_n) exactly when disc | n, and it is an n-th root
    # of a only for even n; for squarefree n this means lcm(2, disc) | n.
    halving = 2 * disc if disc % 2 else disc
    mu, phi = _mobius_phi(N)
    n = np.arange(1, N + 1)
    mu_n = mu[1:].astype(np.float64)
    deg = n.astype(np.float64) * phi[1:].astype(np.float64)
    deg = np.where(n % halving == 0, deg / 2, deg)
    terms = mu_n / deg
    with mp.workdps(digits + GUARD_DIGITS):
        value = mpf(math.fsum(terms.tolist()))
        rounding = mpf(N) * mpf(2) ** -52
        return HighPrecisionValue(value, _tail_bound(N, rounding), digits)
