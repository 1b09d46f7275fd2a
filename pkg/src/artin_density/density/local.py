"""Local data at each prime: degrees, coset counts, measures, naive densities."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Sequence, Tuple, Union

from ..constants import EulerFactorFamily, artin_family, multi_family
from ..qgroups import (
    ExponentLattice,
    ModPImage,
    SignHomomorphism,
    SquareClass,
    factor_int,
    mod_p_image,
    sign_obstruction,
    sign_solve,
)
from ..smith import smith_normal_form
from .problem import Kind, LocalData, NaiveDensity, ProblemSpec

Marked = Sequence[Union[int, Sequence[int]]]


def field_degree(lattice: ExponentLattice, p: int) -> int:
    """``[M_p:Q] = (p-1) * #image mod p-th powers``."""
    size = mod_p_image(lattice, p).size
    return size if p == 2 else (p - 1) * size


def _groups(marked: Marked) -> List[Tuple[int, ...]]:
    return [(m,) if isinstance(m, int) else tuple(m) for m in marked]


def k_p(lattice: ExponentLattice, marked: Marked, p: int) -> int:
    """Number of cosets of ``ker phi_p`` in the union of the kernels for the marked subgroups.

    Inclusion-exclusion over the marked subgroups: each intersection of
    kernels has index ``#image_I`` in the dual of the full image.
    """
    groups = _groups(marked)
    full = mod_p_image(lattice, p).rank
    total = 0
    for size in range(1, len(groups) + 1):
        for sel in combinations(groups, size):
            idx = {i for g in sel for i in g}
            total += (-1) ** (size + 1) * p ** (full - mod_p_image(lattice, p, idx).rank)
    return total


def sign_constraints(problem: ProblemSpec) -> List[Tuple[SquareClass, int]]:
    """Prescribed Frobenius signs on square roots: -1 on marked, +1 on split generators."""
    out = [(SquareClass.of(problem.gens[i]), -1) for i in problem.marked]
    out += [(SquareClass.of(problem.gens[i]), 1) for i in problem.split]
    return out


def two_adic_character(problem: ProblemSpec) -> Tuple[Fraction, Callable[[SquareClass], Fraction]]:
    """Measure of the good set at 2 and the average of ``psi(b)`` over it.

    The second return value maps a class ``b`` to ``E_{chi_b, 2}``.  For the
    rank-r problem the good set is every nontrivial ``psi``; otherwise it is
    the coset of ``psi`` taking the prescribed signs.
    """
    lattice = problem.lattice
    image = mod_p_image(lattice, 2)
    n2 = image.size
    if problem.kind is Kind.RANK_R:
        if n2 == 1:
            return Fraction(0), lambda b: Fraction(0)
        off = Fraction(-1, n2 - 1)

        def average_rank_r(b: SquareClass) -> Fraction:
            if b.is_identity:
                return Fraction(1)
            return off if in_two_image(lattice, b, image) else Fraction(0)

        return Fraction(n2 - 1, n2), average_rank_r

    cons = sign_constraints(problem)
    if not cons:
        return Fraction(1), lambda b: Fraction(1) if b.is_identity else Fraction(0)
    hom = sign_solve(cons)
    if hom is None:
        return Fraction(0), lambda b: Fraction(0)

    def average(b: SquareClass, hom: SignHomomorphism = hom) -> Fraction:
        try:
            return Fraction(hom(b))
        except ValueError:
            # psi(b) is unconstrained on the good set and averages to zero
            return Fraction(0)

    return Fraction(1, 2**hom.rank), average


def in_two_image(lattice: ExponentLattice, b: SquareClass, image: ModPImage = None) -> bool:
    """Whether the class ``b`` lies in the image of the lattice modulo squares."""
    image = image or mod_p_image(lattice, 2)
    try:
        image.coordinates(lattice.class_vector(b.rep))
    except ValueError:
        return False
    return True


def local_data(problem: ProblemSpec, p: int) -> LocalData:
    lattice = problem.lattice
    degree = field_degree(lattice, p)
    if p == 2:
        measure, _ = two_adic_character(problem)
        bad = degree - measure * degree
        return LocalData(2, degree, int(bad), measure)
    if problem.kind is Kind.RANK_R:
        kp = 1
    else:
        kp = k_p(lattice, problem.marked, p)
    return LocalData(p, degree, kp, 1 - Fraction(kp, degree))


# --------------------------------------------------------------------------
# naive densities
# --------------------------------------------------------------------------

def _prime_divisors(n: int) -> Iterable[int]:
    return factor_int(abs(n)).keys()


@lru_cache(maxsize=None)
def _sub_smith(matrix: Tuple[Tuple[int, ...], ...], ncols: int, idx: Tuple[int, ...]):
    return smith_normal_form([matrix[i] for i in idx], ncols=ncols)


def _subsets(marked: Sequence[int]):
    for size in range(1, len(marked) + 1):
        for sel in combinations(marked, size):
            yield sel


def generic_family(problem: ProblemSpec) -> Tuple[EulerFactorFamily, int]:
    """Euler factor shared by all primes not dividing any relevant elementary divisor.

    Returns the family and the free rank it refers to.
    """
    lattice = problem.lattice
    if problem.kind is Kind.RANK_R:
        r = lattice.free_rank
        return artin_family(r), r
    ncols = len(lattice.primes)
    coeffs: Dict[int, int] = {}
    for sel in _subsets(problem.marked):
        rk = _sub_smith(lattice.matrix, ncols, tuple(sel)).rank
        coeffs[rk] = coeffs.get(rk, 0) + (-1) ** (len(sel) + 1)
    top = max(coeffs, default=0)
    q = tuple(coeffs.get(i, 0) for i in range(top + 1))
    r = _sub_smith(lattice.matrix, ncols, tuple(problem.marked)).rank if problem.marked else 0
    named = multi_family(r)
    if named.q_coeffs == EulerFactorFamily("", q).q_coeffs:
        return named, r
    name = "custom[" + EulerFactorFamily("", q).description.split("Q(x) = ")[1] + "]"
    return EulerFactorFamily(name, q, skip_two=True), r


def nongeneric_primes(problem: ProblemSpec) -> Tuple[int, ...]:
    """Odd primes at which the local factor may differ from the generic one."""
    lattice = problem.lattice
    ncols = len(lattice.primes)
    out = set()
    if problem.kind is Kind.RANK_R:
        for d in lattice.elementary_divisors:
            out.update(_prime_divisors(d))
    else:
        for sel in _subsets(problem.marked):
            for d in _sub_smith(lattice.matrix, ncols, tuple(sel)).elementary_divisors:
                out.update(_prime_divisors(d))
    out.discard(2)
    return tuple(sorted(out))


def naive_density(problem: ProblemSpec) -> NaiveDensity:
    """``nu(S) = rho * prod_p F(1/p)`` with ``F`` the generic local factor."""
    family, r = generic_family(problem)
    odd = nongeneric_primes(problem)
    rho = Fraction(1)
    for p in (2,) + odd:
        actual = local_data(problem, p).sp_measure
        if p == 2 and family.skip_two:
            rho *= actual
        else:
            rho *= actual / family.factor(p)
    return NaiveDensity(rho, r, family, odd)


def naive_rank_r(lattice_or_problem) -> NaiveDensity:
    problem = _as_problem(lattice_or_problem, Kind.RANK_R)
    return naive_density(problem)


def naive_multi(problem: ProblemSpec) -> NaiveDensity:
    if problem.kind is not Kind.MULTI:
        raise ValueError("naive_multi expects a multiple primitive root problem")
    return naive_density(problem)


def _as_problem(obj, kind: Kind) -> ProblemSpec:
    if isinstance(obj, ProblemSpec):
        if obj.kind is not kind:
            raise ValueError(f"expected a {kind.value} problem")
        return obj
    if isinstance(obj, ExponentLattice):
        gens = [g.value() for g in obj.generators]
    else:
        gens = list(obj)
    return ProblemSpec.rank_r(gens) if kind is Kind.RANK_R else ProblemSpec.multi(gens)


def naive_zero_witness(problem: ProblemSpec):
    """Constraint indices whose classes multiply to a square against the prescribed signs."""
    return sign_obstruction(sign_constraints(problem))
