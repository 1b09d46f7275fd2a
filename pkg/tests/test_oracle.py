from fractions import Fraction

import pytest
import sympy
from mpmath import mp, mpf

from artin_density.constants import REFERENCE_C
from artin_density.density import (
    ModelTooLargeError,
    ProblemSpec,
    finite_model_count,
    finite_model_oracle,
    jacobi,
    k_p,
    kernel_union_count,
    kronecker,
    rank1_inclusion_exclusion,
    restricted_density,
    total_density,
)
from artin_density.qgroups import build_lattice, critical_primes

from conftest import random_rational

F = Fraction


def _random_problem(rng, primes=(2, 3, 5, 7)):
    while True:
        gens = [random_rational(rng, primes, max_exp=2) for _ in range(rng.randint(1, 3))]
        roll = rng.random()
        try:
            if roll < 0.45:
                return ProblemSpec.rank_r(gens)
            if roll < 0.9:
                return ProblemSpec.multi(gens)
            odd = [p for p in primes if p != 2]
            chosen = rng.sample(odd, rng.randint(0, min(2, len(odd))))
            cut = rng.randint(0, len(chosen))
            return ProblemSpec.schinzel(chosen[:cut], chosen[cut:])
        except ValueError:
            continue


# ---------------------------------------------------------------- symbols

def test_jacobi_matches_sympy():
    for n in range(1, 200, 2):
        for a in range(-60, 61):
            assert jacobi(a, n) == sympy.jacobi_symbol(a % n, n)


def test_kronecker_matches_sympy():
    for d in (-4, -3, -8, 5, 8, 12, -15, 21, 24, -40):
        for n in range(1, 300):
            assert kronecker(d, n) == sympy.functions.combinatorial.numbers.kronecker_symbol(d, n)


def test_jacobi_rejects_even_modulus():
    with pytest.raises(ValueError):
        jacobi(3, 8)


# ---------------------------------------------------------------- kernel counts

def test_kernel_union_count_equals_inclusion_exclusion(rng):
    for _ in range(50):
        gens = [random_rational(rng, (2, 3, 5, 7, 11)) for _ in range(rng.randint(1, 4))]
        lat = build_lattice(gens)
        marked = sorted(rng.sample(range(len(gens)), rng.randint(1, len(gens))))
        for p in (2, 3, 5, 7):
            assert kernel_union_count(lat, marked, p) == k_p(lat, marked, p)


# ---------------------------------------------------------------- finite model

def test_finite_model_rank_one_five():
    count = finite_model_count(ProblemSpec.rank_r([5]))
    assert count.density == F(1, 2)
    assert F(20, 19) * F(1, 2) * F(19, 20) == count.density
    assert count.ambient == 2 * 4 * 5 * 4
    assert (count.group, count.good) == (count.ambient // 2, count.ambient // 4)


def test_finite_model_rank_one_two():
    assert finite_model_oracle(ProblemSpec.rank_r([2])) == F(1, 2)


def test_finite_model_three_five():
    prob = ProblemSpec.multi([3, 5])
    expected = F(100, 91) * F(1, 4) * F(13, 18) * F(91, 100)
    assert finite_model_oracle(prob) == expected == F(13, 72)
    assert finite_model_oracle(prob, mode="full") == expected


def test_full_and_factored_modes_agree(rng):
    done = 0
    while done < 25:
        prob = _random_problem(rng, (2, 3, 5))
        try:
            full = finite_model_count(prob, mode="full", bound=200_000)
        except ModelTooLargeError:
            continue
        fact = finite_model_count(prob, mode="factored")
        assert (full.good, full.group) == (fact.good, fact.group)
        done += 1


def test_oracle_equals_closed_form_on_random_problems(rng):
    for _ in range(150):
        prob = _random_problem(rng, (2, 3, 5, 7, 11, 13) if rng.random() < 0.3 else (2, 3, 5, 7))
        assert set(critical_primes(prob.lattice)) <= {2, 3, 5, 7, 11, 13}
        assert finite_model_oracle(prob) == restricted_density(prob)


def test_extra_primes_do_not_change_agreement():
    prob = ProblemSpec.rank_r([5])
    for primes in ([2, 5, 3], [2, 5, 7], [2, 3, 5, 7]):
        assert finite_model_oracle(prob, primes) == restricted_density(prob, primes)


def test_missing_critical_prime_is_rejected():
    with pytest.raises(ValueError):
        finite_model_oracle(ProblemSpec.rank_r([5]), [2])
    with pytest.raises(ValueError):
        restricted_density(ProblemSpec.rank_r([5]), [2])


def test_model_bound_is_enforced():
    prob = ProblemSpec.multi([3, 5, 7, 11])
    with pytest.raises(ModelTooLargeError):
        finite_model_count(prob, mode="full")
    with pytest.raises(ModelTooLargeError):
        finite_model_count(prob, bound=100)


def test_unknown_mode():
    with pytest.raises(ValueError):
        finite_model_count(ProblemSpec.rank_r([2]), mode="sampled")


def test_oracle_is_zero_for_inconsistent_signs():
    assert finite_model_oracle(ProblemSpec.multi([2, 3, 6])) == 0


# ---------------------------------------------------------------- Möbius series

def test_rank1_single_term():
    v = rank1_inclusion_exclusion(2, 1)
    assert v.value == 1


def test_rank1_against_artin_constant():
    with mp.workdps(30):
        c1 = mpf(REFERENCE_C[0])
        two = rank1_inclusion_exclusion(2, 10**4)
        five = rank1_inclusion_exclusion(5, 10**4)
        assert abs(two.value - c1) < mpf(10) ** -3
        assert abs(five.value - c1 * 20 / 19) < mpf(10) ** -3


@pytest.mark.parametrize("a", [2, 3, 5, 6, 13, 21, 30, 105])
def test_rank1_within_tail_bound(a):
    series = rank1_inclusion_exclusion(a, 2 * 10**4)
    exact = total_density(ProblemSpec.rank_r([a]), 20)
    with mp.workdps(30):
        assert abs(series.value - exact.total) <= series.error_bound + exact.error_bound


def test_rank1_tail_bound_shrinks():
    small = rank1_inclusion_exclusion(5, 10**3)
    large = rank1_inclusion_exclusion(5, 10**5)
    assert large.error_bound < small.error_bound


@pytest.mark.parametrize("a", [1, 4, 12, -3, 0])
def test_rank1_rejects_non_squarefree(a):
    with pytest.raises(ValueError):
        rank1_inclusion_exclusion(a, 100)
