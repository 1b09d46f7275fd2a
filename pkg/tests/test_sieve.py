from fractions import Fraction

import pytest
import sympy
from sympy.ntheory import is_primitive_root as is_primitive_root_sympy

from artin_density.density import ProblemSpec
from artin_density.sieve import (
    MAX_SEGMENT,
    SieveBudgetError,
    count_qualifying,
    empirical_density,
    is_primitive_root,
    predicate,
    primes_up_to,
)

from conftest import random_rational

F = Fraction


# ---------------------------------------------------------------- prime stream

def test_prime_counts():
    assert primes_up_to(100).count() == 25
    assert list(primes_up_to(100)) == list(sympy.primerange(2, 101))
    assert primes_up_to(10**6).count() == sympy.primepi(10**6) == 78498


@pytest.mark.parametrize("segment_size", [16, 17, 97, 1000, 4096, 1 << 20])
def test_stream_is_independent_of_segmentation(segment_size):
    bound = 30_011
    assert list(primes_up_to(bound, segment_size)) == list(sympy.primerange(2, bound + 1))


@pytest.mark.parametrize("bound", [2, 3, 4, 9, 25, 49, 121, 10_007])
def test_small_and_square_bounds(bound):
    assert list(primes_up_to(bound, 16)) == list(sympy.primerange(2, bound + 1))


def test_budget_errors():
    with pytest.raises(SieveBudgetError):
        primes_up_to(10**10)
    with pytest.raises(SieveBudgetError):
        primes_up_to(10**6, MAX_SEGMENT * 2)
    with pytest.raises(SieveBudgetError):
        primes_up_to(10**6, ceiling=10**5)
    with pytest.raises(ValueError):
        primes_up_to(1)
    with pytest.raises(SieveBudgetError):
        count_qualifying(ProblemSpec.rank_r([2]), 2 * 10**9)


# ---------------------------------------------------------------- primitive roots

def test_primitive_root_examples():
    assert is_primitive_root(2, 11) is True
    assert is_primitive_root(2, 7) is False
    assert all(is_primitive_root(4, q) is False for q in sympy.primerange(5, 500))
    assert is_primitive_root(6, 3) is None
    assert is_primitive_root(F(1, 3), 3) is None


def test_primitive_root_matches_sympy():
    for q in sympy.primerange(3, 2000):
        for a in (2, 3, 5, -1, -3, 7, 10):
            if a % q == 0:
                continue
            assert is_primitive_root(a, q) == is_primitive_root_sympy(a % q, q)


def test_rational_primitive_roots():
    # a/b reduces to a * b^{-1} mod q
    for q in sympy.primerange(11, 400):
        r = 3 * pow(5, -1, q) % q
        assert is_primitive_root(F(3, 5), q) == is_primitive_root_sympy(r, q)


def test_primitive_root_rejects_composite_modulus():
    with pytest.raises(ValueError):
        is_primitive_root(2, 15)


# ---------------------------------------------------------------- predicates

def test_predicate_examples():
    assert predicate(ProblemSpec.rank_r([2, 3]), 7) is True
    assert predicate(ProblemSpec.multi([2, 3]), 7) is False
    assert predicate(ProblemSpec.schinzel([5]), 7) is True
    assert predicate(ProblemSpec.rank_r([2, 3]), 3) is None
    assert predicate(ProblemSpec.rank_r([5]), 2) is None


def _subgroup_is_everything(gens, q):
    residues = {g.numerator * pow(g.denominator, -1, q) % q for g in gens}
    seen = {1}
    frontier = [1]
    while frontier:
        x = frontier.pop()
        for r in residues:
            y = x * r % q
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) == q - 1


def test_rank_r_predicate_is_surjectivity(rng):
    for _ in range(30):
        gens = [random_rational(rng, (2, 3, 5, 7)) for _ in range(rng.randint(1, 3))]
        try:
            prob = ProblemSpec.rank_r(gens)
        except ValueError:
            continue
        for q in sympy.primerange(11, 600):
            assert predicate(prob, q) == _subgroup_is_everything(prob.gens, q)


def test_schinzel_predicate_uses_quadratic_characters():
    prob = ProblemSpec.schinzel([3], [5])
    for q in sympy.primerange(7, 2000):
        expected = (
            is_primitive_root_sympy(3, q)
            and sympy.functions.combinatorial.numbers.kronecker_symbol(5, q) == 1
            and sympy.functions.combinatorial.numbers.kronecker_symbol(8, q) == 1
        )
        assert predicate(prob, q) == expected


def test_multi_implies_rank_r(rng):
    for _ in range(30):
        gens = [random_rational(rng, (2, 3, 5, 7)) for _ in range(rng.randint(1, 3))]
        try:
            multi = ProblemSpec.multi(gens)
            rank = ProblemSpec.rank_r(gens)
        except ValueError:
            continue
        for q in sympy.primerange(11, 3000):
            if predicate(multi, q):
                assert predicate(rank, q)


@pytest.mark.parametrize("a", [2, 3, 5, -3, 8, 12, F(2, 3), -5])
def test_single_generator_problems_agree(a):
    rank, multi = ProblemSpec.rank_r([a]), ProblemSpec.multi([a])
    for q in sympy.primerange(2, 5000):
        assert predicate(rank, q) == predicate(multi, q)
    assert count_qualifying(rank, 10**5) == count_qualifying(multi, 10**5)


# ---------------------------------------------------------------- vectorised counts

def _scalar_count(problem, bound):
    eligible = qualifying = 0
    for q in sympy.primerange(2, bound + 1):
        verdict = predicate(problem, q)
        if verdict is None:
            continue
        eligible += 1
        qualifying += verdict
    return eligible, qualifying


@pytest.mark.parametrize(
    "problem",
    [
        ProblemSpec.rank_r([2]),
        ProblemSpec.rank_r([5]),
        ProblemSpec.rank_r([2, 3]),
        ProblemSpec.rank_r([F(-7, 12)]),
        ProblemSpec.multi([3, 5]),
        ProblemSpec.multi([-3, 10, F(5, 7)]),
        ProblemSpec.schinzel([5], [13]),
        ProblemSpec.schinzel([], []),
    ],
    ids=lambda p: p.describe(),
)
def test_vectorised_count_matches_scalar(problem):
    assert count_qualifying(problem, 30_000, segment_size=4096) == _scalar_count(problem, 30_000)


def test_large_generators_match_scalar():
    big = F(2**61 - 1, 3**20)
    prob = ProblemSpec.rank_r([big])
    assert count_qualifying(prob, 20_000) == _scalar_count(prob, 20_000)


def test_artin_two_below_hundred():
    rep = empirical_density(ProblemSpec.rank_r([2]), 100)
    assert (rep.qualifying, rep.eligible) == (12, 24)
    assert 0 <= rep.observed <= 1
    assert rep.eligible <= 25


@pytest.mark.parametrize(
    "gens",
    [[5, -15, 600, 1029], [7, -21, -1176, F(-8, 3)], [2, 3, 6], [2, 4]],
)
def test_vanishing_problems_have_no_primes(gens):
    rep = empirical_density(ProblemSpec.multi(gens), 2 * 10**5, predicted=0.0)
    assert rep.qualifying == 0
    assert rep.eligible > 17_000


def test_results_do_not_depend_on_threads_or_segments():
    prob = ProblemSpec.multi([3, 5])
    base = empirical_density(prob, 300_000, threads=1, segment_size=1 << 16)
    for threads, seg in ((4, 1 << 16), (3, 5000), (1, 1 << 20)):
        other = empirical_density(prob, 300_000, threads=threads, segment_size=seg)
        assert other.as_dict() == base.as_dict()


def test_report_fields():
    rep = empirical_density(ProblemSpec.rank_r([2]), 10**4)
    d = rep.as_dict()
    assert {"bound", "eligible", "qualifying", "observed", "predicted", "deviation", "scale", "note"} <= set(d)
    assert abs(rep.deviation - (rep.observed - rep.predicted)) < 1e-15
    assert "heuristic" in rep.note
