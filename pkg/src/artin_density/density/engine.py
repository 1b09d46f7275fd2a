"""Entanglement correction factors.

Every correction factor here is a finite character sum: one term per
quadratic character cut out by a square class ``b`` of the group, each term
a product of local averages.  The closed forms at the bottom are independent
rewritings used as cross-checks.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Sequence, Union

from ..qgroups import SquareClass, factor_int, is_prime, mod_p_image, square_classes
from .local import local_data, two_adic_character
from .problem import Kind, LocalData, ProblemSpec

Weights = Union[Mapping[SquareClass, Fraction], Callable[[SquareClass], Fraction]]


def odd_primes_of(rep: int):
    return sorted(p for p in factor_int(abs(rep)) if p != 2)


def _weight_lookup(weights: Weights) -> Callable[[SquareClass], Fraction]:
    if callable(weights):
        return weights
    table = {c.rep: Fraction(w) for c, w in weights.items()}
    return lambda b: table.get(b.rep, Fraction(0))


def character_sum_engine(
    classes: Iterable[SquareClass],
    weights: Weights,
    locals_: Mapping[int, LocalData],
) -> Fraction:
    """Sum over the characters ``chi_[b]`` of the product of local averages.

    ``weights`` gives the 2-adic average of ``b^{1/2}`` over the good set at 2,
    either as a mapping (absent classes weigh 0) or as a function.  A class and
    its negative define the same character; the representative with
    discriminant 1 mod 4 is used, and classes of even discriminant 8m
    contribute nothing because their 2-part is ramified beyond what the good
    set at 2 sees.
    """
    weight = _weight_lookup(weights)
    seen = set()
    total = Fraction(0)
    for b in classes:
        if b.disc % 8 == 0:
            continue
        rep = b if b.disc % 4 == 1 else -b
        if rep.rep in seen:
            continue
        seen.add(rep.rep)
        term = weight(rep)
        if term == 0:
            continue
        for p in odd_primes_of(rep.rep):
            if p not in locals_:
                raise ValueError(f"no local data at p = {p}")
            term *= locals_[p].factor
        total += term
    return total


def _locals_for(problem: ProblemSpec, classes: Sequence[SquareClass]) -> Dict[int, LocalData]:
    primes = {p for b in classes for p in odd_primes_of(b.rep)}
    return {p: local_data(problem, p) for p in sorted(primes)}


def entanglement(problem: ProblemSpec) -> Fraction:
    """Correction factor ``E`` with ``density = E * naive density``."""
    classes = square_classes(problem.lattice)
    _, weight = two_adic_character(problem)
    return character_sum_engine(classes, weight, _locals_for(problem, classes))


def entanglement_rank_r(problem) -> Fraction:
    from .local import _as_problem

    return entanglement(_as_problem(problem, Kind.RANK_R))


def entanglement_multi(problem: ProblemSpec) -> Fraction:
    if problem.kind is Kind.RANK_R:
        raise ValueError("entanglement_multi expects a primitive root problem")
    return entanglement(problem)


def identity_410(problem) -> Fraction:
    """Rank-r correction factor written as a ratio of two Euler factors at 2."""
    from .local import _as_problem

    problem = _as_problem(problem, Kind.RANK_R)
    lattice = problem.lattice
    n2 = mod_p_image(lattice, 2).size
    if n2 == 1:
        raise ValueError("the group consists of squares; the naive density vanishes")
    inner = Fraction(0)
    for b in square_classes(lattice):
        if b.disc % 4 != 1:
            continue
        term = Fraction(1)
        for p in odd_primes_of(b.rep):
            d = local_data(problem, p).degree
            term *= Fraction(-1, d - 1)
        inner += term
    return (1 - inner / n2) / (1 - Fraction(1, n2))


def _legendre_minus_one(p: int) -> int:
    return 1 if p % 4 == 1 else -1


def _check_odd_primes(primes: Iterable[int]) -> list:
    out = []
    for p in primes:
        p = int(p)
        if p == 2 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        out.append(p)
    if len(set(out)) != len(out):
        raise ValueError("repeated primes")
    return out


def _d_value(problem: ProblemSpec, p: int) -> Fraction:
    loc = local_data(problem, p)
    c = Fraction(loc.kp, loc.degree)
    return c / (1 - c)


def closed_form_58(primes: Iterable[int]) -> Fraction:
    """Product form of the correction factor when every element is an odd prime."""
    a_set = _check_odd_primes(primes)
    if not a_set:
        raise ValueError("need at least one prime")
    problem = ProblemSpec.multi(a_set)
    plus, twisted = Fraction(1), Fraction(1)
    for p in a_set:
        d = _d_value(problem, p)
        plus *= 1 + d
        twisted *= 1 + _legendre_minus_one(p) * d
    if all(p % 4 == 1 for p in a_set):
        return plus
    return (plus + twisted) / 2


def schinzel_closed_form(primitive: Iterable[int], split: Iterable[int] = ()) -> Fraction:
    """Closed form of the correction factor with split primes ``B`` and 2."""
    problem = ProblemSpec.schinzel(primitive, split)
    plus, twisted = Fraction(1), Fraction(1)
    for p in problem.primitive_set:
        p = int(p)
        d = _d_value(problem, p)
        plus *= 1 + d
        twisted *= 1 + _legendre_minus_one(p) * d
    for p in problem.split_set:
        p = int(p)
        if p == 2:
            continue
        d = _d_value(problem, p)
        plus *= 1 - d
        twisted *= 1 - _legendre_minus_one(p) * d
    return (plus + twisted) / 2
