"""Problem descriptions and the report types shared across the density code."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

from mpmath import mpf

from ..constants import EulerFactorFamily, HighPrecisionValue
from ..qgroups import ExponentLattice, build_lattice, is_prime, parse_rational

MAX_MARKED = 12


class Kind(str, Enum):
    RANK_R = "rank-r"
    MULTI = "multi"
    SCHINZEL = "schinzel"


@dataclass(frozen=True)
class ProblemSpec:
    """Which primes ``q`` are counted, in terms of a generator list.

    ``marked`` lists the generator indices that must be primitive roots and
    ``split`` those whose square roots must be fixed by Frobenius (the primes
    of the Schinzel variant, with 2 always included).
    """

    kind: Kind
    gens: Tuple[Fraction, ...]
    marked: Tuple[int, ...] = ()
    split: Tuple[int, ...] = ()

    @classmethod
    def rank_r(cls, gens: Iterable) -> "ProblemSpec":
        spec = cls(Kind.RANK_R, tuple(parse_rational(g) for g in gens))
        if not spec.gens:
            raise ValueError("need at least one generator")
        if spec.lattice.free_rank == 0:
            raise ValueError("the subgroup has rank 0; surjectivity onto F_q* is not a density question")
        return spec

    @classmethod
    def multi(cls, elements: Iterable) -> "ProblemSpec":
        gens = tuple(parse_rational(a) for a in elements)
        if not gens:
            raise ValueError("need at least one element")
        for a in gens:
            if a == 0 or abs(a) == 1:
                raise ValueError(f"{a} cannot be a primitive root for infinitely many primes")
        if len(gens) > MAX_MARKED:
            raise ValueError(f"at most {MAX_MARKED} elements are supported")
        return cls(Kind.MULTI, gens, tuple(range(len(gens))))

    @classmethod
    def schinzel(cls, primitive: Iterable[int], split: Iterable[int] = ()) -> "ProblemSpec":
        a_set = [int(a) for a in primitive]
        b_set = [int(b) for b in split if int(b) != 2]
        for x in a_set + b_set:
            if x == 2 or not is_prime(x):
                raise ValueError(f"{x} is not an odd prime")
        if len(set(a_set)) != len(a_set) or len(set(b_set)) != len(b_set):
            raise ValueError("repeated primes")
        overlap = set(a_set) & set(b_set)
        if overlap:
            raise ValueError(f"primitive and split sets overlap in {sorted(overlap)}")
        if len(a_set) > MAX_MARKED:
            raise ValueError(f"at most {MAX_MARKED} primitive-root primes are supported")
        gens = tuple(Fraction(x) for x in a_set + b_set + [2])
        n = len(a_set)
        return cls(Kind.SCHINZEL, gens, tuple(range(n)), tuple(range(n, len(gens))))

    @cached_property
    def lattice(self) -> ExponentLattice:
        return build_lattice(self.gens)

    @property
    def primitive_set(self) -> Tuple[Fraction, ...]:
        return tuple(self.gens[i] for i in self.marked)

    @property
    def split_set(self) -> Tuple[Fraction, ...]:
        return tuple(self.gens[i] for i in self.split)

    def describe(self) -> str:
        g = ",".join(str(x) for x in self.gens)
        if self.kind is Kind.SCHINZEL:
            a = ",".join(str(x) for x in self.primitive_set)
            b = ",".join(str(x) for x in self.split_set)
            return f"schinzel A={{{a}}} B={{{b}}}"
        return f"{self.kind.value} <{g}>"


@dataclass(frozen=True)
class LocalData:
    """Local information at ``p``: degree ``[M_p:Q]``, bad-coset count, good measure."""

    p: int
    degree: int
    kp: int
    sp_measure: Fraction

    @property
    def factor(self) -> Fraction:
        """Local correction ``-k_p / (deg - k_p)`` for characters ramified at ``p``."""
        return Fraction(-self.kp, self.degree - self.kp)


@dataclass(frozen=True)
class NaiveDensity:
    """``rho * prod_p F(1/p)`` where ``family`` describes ``F``."""

    rho: Fraction
    rank: int
    family: EulerFactorFamily
    nongeneric: Tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    kind: str  # positive | naive_zero | entanglement_zero
    witnesses: Tuple[str, ...] = ()
    subset: Optional[Tuple[int, ...]] = None
    shortcut: Optional[bool] = None

    @property
    def is_positive(self) -> bool:
        return self.kind == "positive"


@dataclass(frozen=True)
class DensityReport:
    problem: ProblemSpec
    rho: Fraction
    family: EulerFactorFamily
    constant: HighPrecisionValue
    entanglement: Optional[Fraction]
    total: mpf
    error_bound: mpf
    verdict: Verdict
    digits: int = 20
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def constant_name(self) -> str:
        return self.family.name
