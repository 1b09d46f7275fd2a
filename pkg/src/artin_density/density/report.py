"""Putting the pieces together into a density with an error bound."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from mpmath import mp, mpf

from ..constants import GUARD_DIGITS, euler_constant
from ..qgroups import critical_primes
from .engine import entanglement, schinzel_closed_form
from .local import local_data, naive_density, naive_zero_witness
from .problem import DensityReport, Kind, ProblemSpec, Verdict
from .vanishing import vanishing_verdict


def _frac(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


def _verdict(problem: ProblemSpec, rho: Fraction, e: Optional[Fraction]) -> Verdict:
    if problem.kind is Kind.MULTI:
        return vanishing_verdict(problem)
    if rho == 0:
        if problem.kind is Kind.RANK_R:
            return Verdict("naive_zero", ("every element of the group is a square",))
        subset = naive_zero_witness(problem)
        one_based = tuple(i + 1 for i in subset) if subset else None
        return Verdict("naive_zero", ("the prescribed signs are inconsistent on this subset",), one_based)
    if e == 0:
        return Verdict("entanglement_zero", ("the character sum vanishes",))
    return Verdict("positive")


def total_density(problem: ProblemSpec, digits: int = 20) -> DensityReport:
    """Naive density, correction factor and their product for ``problem``."""
    naive = naive_density(problem)
    e = entanglement(problem) if naive.rho else None
    verdict = _verdict(problem, naive.rho, e)
    if verdict.is_positive and (naive.rho == 0 or e == 0):
        raise AssertionError("vanishing criterion disagrees with the character sum")
    if not verdict.is_positive and naive.rho and e:
        raise AssertionError("vanishing criterion disagrees with the character sum")

    constant = euler_constant(naive.family, digits)
    extras = {"nongeneric_primes": naive.nongeneric}
    if problem.kind is Kind.SCHINZEL:
        extras["closed_form"] = schinzel_closed_form(
            [int(a) for a in problem.primitive_set], [int(b) for b in problem.split_set]
        )
    with mp.workdps(digits + GUARD_DIGITS):
        if verdict.is_positive:
            scale = _frac(naive.rho * e)
            total = scale * constant.value
            error = abs(scale) * constant.error_bound
        else:
            total, error = mpf(0), mpf(0)
        return DensityReport(
            problem=problem,
            rho=naive.rho,
            family=naive.family,
            constant=constant,
            entanglement=e,
            total=+total,
            error_bound=+error,
            verdict=verdict,
            digits=digits,
            extras=extras,
        )


def schinzel_density(primitive: Iterable[int], split: Iterable[int] = (), digits: int = 20) -> DensityReport:
    return total_density(ProblemSpec.schinzel(primitive, split), digits)


def restricted_density(problem: ProblemSpec, primes: Optional[Iterable[int]] = None) -> Fraction:
    """``E * prod_{p in primes} nu_p(S_p)``, the density when only ``primes`` impose conditions.

    This is what the finite model computes; ``primes`` must contain the
    critical primes so that every entanglement character is visible.
    """
    needed = set(critical_primes(problem.lattice))
    chosen = set(needed if primes is None else (int(p) for p in primes))
    if not needed <= chosen:
        raise ValueError(f"missing critical primes {sorted(needed - chosen)}")
    value = entanglement(problem)
    for p in sorted(chosen):
        value *= local_data(problem, p).sp_measure
    return value
