import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

SMALL_PRIMES = (2, 3, 5, 7, 11, 13)

# PASS/FAIL lines from the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES = []


@st.composite
def rationals(draw, primes=(2, 3, 5, 7), max_exp=3):
    """Nonzero rationals supported on ``primes``."""
    sign = draw(st.sampled_from((1, -1)))
    x = Fraction(sign)
    for p in draw(st.lists(st.sampled_from(primes), min_size=1, max_size=2, unique=True)):
        e = draw(st.integers(-max_exp, max_exp))
        x *= Fraction(p) ** e
    return x


def random_rational(rng: random.Random, primes=(2, 3, 5, 7), max_exp=3) -> Fraction:
    x = Fraction(rng.choice((1, -1)))
    for p in rng.sample(primes, rng.randint(1, 2)):
        x *= Fraction(p) ** (rng.randint(-max_exp, max_exp) or 1)
    return x


def unimodular_mix(gens, rng, steps=6):
    gens = list(gens)
    for _ in range(steps):
        i, j = rng.sample(range(len(gens)), 2) if len(gens) > 1 else (0, 0)
        if i == j:
            gens[i] = 1 / gens[i]
            continue
        k = rng.choice((-2, -1, 1, 2))
        gens[i] = gens[i] * gens[j] ** k
    return gens


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
