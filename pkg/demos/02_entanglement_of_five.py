"""Why 5 is a primitive root more often than 2.

For a = 2 the naive density C_1 is correct.  For a = 5 the field Q(sqrt 5)
sits inside Q(zeta_5), so the conditions at 2 and at 5 are not independent
and the density picks up a factor 20/19.  We see this four ways: the
character sum, an exact count in a finite Galois model, the classical
Möbius series and an actual count of primes.
"""
from fractions import Fraction

from artin_density.density import (
    ProblemSpec,
    finite_model_count,
    rank1_inclusion_exclusion,
    total_density,
)
from artin_density.sieve import empirical_density


def main():
    for a in (2, 5):
        problem = ProblemSpec.rank_r([a])
        rep = total_density(problem, 15)
        print(f"a = {a}: rho = {rep.rho}, E = {rep.entanglement}, density = {rep.total}")

    problem = ProblemSpec.rank_r([5])
    count = finite_model_count(problem, mode="full")
    print(f"\nfinite model over the primes 2 and 5: |H| = {count.ambient}, |G| = {count.group}, good = {count.good}")
    print(f"  density in the model {count.density}; naive local product (1/2)(19/20) = {Fraction(19, 40)}")
    print(f"  ratio {count.density / Fraction(19, 40)} is the correction factor")

    series = rank1_inclusion_exclusion(5, 10**5)
    print(f"\nMöbius series to 10^5: {series.decimal(10)} (tail bound {float(series.error_bound):.1e})")

    for a in (2, 5):
        rep = empirical_density(ProblemSpec.rank_r([a]), 10**6)
        print(f"primes below 10^6 with primitive root {a}: {rep.qualifying}/{rep.eligible} = {rep.observed:.5f}"
              f" (predicted {rep.predicted:.5f})")


if __name__ == "__main__":
    main()
