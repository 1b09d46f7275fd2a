"""Four integers that are never simultaneously primitive roots.

No subset of (5, -15, 600, 1029) multiplies to a square, so the naive density
is positive.  Yet -3 = 5 * (-15) up to squares, and modulo cubes the four
elements are tied together tightly enough that every prime q = 1 mod 3
makes one of them a cube.  The character sum vanishes, the finite model
has no good elements, and a sieve finds no primes at all.
"""
from artin_density.density import ProblemSpec, finite_model_oracle, naive_density, total_density, vanishing_verdict
from artin_density.sieve import empirical_density

GENS = [5, -15, 600, 1029]


def main():
    problem = ProblemSpec.multi(GENS)
    naive = naive_density(problem)
    print(f"naive density: {naive.rho} x {naive.family.name}")

    verdict = vanishing_verdict(problem)
    print(f"verdict: {verdict.kind}")
    for w in verdict.witnesses:
        print(f"  - {w}")

    print(f"correction factor: {total_density(problem).entanglement}")
    print(f"finite model density: {finite_model_oracle(problem)}")

    rep = empirical_density(problem, 10**6, predicted=0.0)
    print(f"primes below 10^6 where all four are primitive roots: {rep.qualifying} of {rep.eligible}")

    # dropping the last element breaks the cube relation
    three = ProblemSpec.multi(GENS[:3])
    rep3 = total_density(three, 10)
    print(f"\nwithout 1029: verdict {rep3.verdict.kind}, density {rep3.total}")


if __name__ == "__main__":
    main()
