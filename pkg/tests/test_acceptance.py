"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy
from mpmath import mp, mpf

sys.path.insert(0, str(Path(__file__).parent))

from artin_density.constants import compute_table  # noqa: E402
from artin_density.density import (  # noqa: E402
    ProblemSpec,
    character_sum_engine,
    closed_form_58,
    entanglement,
    entanglement_multi,
    entanglement_rank_r,
    finite_model_oracle,
    identity_410,
    k_p,
    kernel_union_count,
    local_data,
    naive_rank_r,
    rank1_inclusion_exclusion,
    restricted_density,
    schinzel_closed_form,
    total_density,
    two_adic_character,
    vanishing_verdict,
)
from artin_density.qgroups import build_lattice, critical_primes, square_classes  # noqa: E402
from artin_density.sieve import empirical_density  # noqa: E402

from conftest import ACCEPTANCE_LINES, random_rational, unimodular_mix  # noqa: E402

F = Fraction
SEED = 20240601


def _report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    if __name__ == "__main__":
        print(line, flush=True)
    assert ok, line


def _random_rank_r(rng):
    while True:
        gens = [random_rational(rng, (2, 3, 5, 7)) for _ in range(rng.randint(1, 3))]
        try:
            prob = ProblemSpec.rank_r(gens)
        except ValueError:
            continue
        if naive_rank_r(prob).rho:
            return prob


def _random_any(rng):
    while True:
        gens = [random_rational(rng, (2, 3, 5, 7)) for _ in range(rng.randint(1, 3))]
        try:
            return ProblemSpec.rank_r(gens) if rng.random() < 0.5 else ProblemSpec.multi(gens)
        except ValueError:
            continue


def test_criterion_1_constants_table():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "artin_density.cli", "constants", "--max-rank", "7", "--digits", "20", "--check"],
        capture_output=True,
        text=True,
        check=False,
    )
    elapsed = time.perf_counter() - start
    rows = proc.stdout.strip().splitlines()[1:]
    entries = compute_table(7, 20)
    ok = (
        proc.returncode == 0
        and len(rows) == 7
        and all(r.endswith("PASS") for r in rows)
        and len(entries) == 14
        and all(e.matches_reference() for e in entries)
        and elapsed < 10
    )
    _report(1, ok, f"14 values within 1 ulp, {elapsed:.2f} s")


def test_criterion_2_oracle_equality():
    suite = [ProblemSpec.rank_r(g) for g in ([2], [5], [2, 5], [2, 3], [8])]
    suite += [ProblemSpec.multi(g) for g in ([3, 5], [5, 13], [2, 3])]
    bad = [p.describe() for p in suite if finite_model_oracle(p) != restricted_density(p)]
    _report(2, not bad, f"{len(suite) - len(bad)}/{len(suite)} exact matches" + (f", mismatched {bad}" if bad else ""))


def test_criterion_3_known_corrections():
    got = {
        "<5>": entanglement_rank_r(build_lattice([5])),
        "<2,5>": entanglement_rank_r(build_lattice([2, 5])),
        "{3,5}": entanglement_multi(ProblemSpec.multi([3, 5])),
        "{5,13}": entanglement_multi(ProblemSpec.multi([5, 13])),
    }
    want = {
        "<5>": F(20, 19),
        "<2,5>": F(298, 297),
        "{3,5}": F(100, 91),
        "{5,13}": closed_form_58([5, 13]),
    }
    ok = got == want and want["{5,13}"] == (1 + F(9, 91)) * (1 + F(25, 2003))
    _report(3, ok, ", ".join(f"{k} = {v}" for k, v in got.items()))


def test_criterion_4_identities():
    rng = random.Random(SEED)
    odd = list(sympy.primerange(3, 60))
    rank_ok = multi_ok = schinzel_ok = 0
    for _ in range(100):
        prob = _random_rank_r(rng)
        rank_ok += entanglement_rank_r(prob) == identity_410(prob)
    for _ in range(100):
        primes = rng.sample(odd, rng.randint(1, 4))
        multi_ok += entanglement_multi(ProblemSpec.multi(primes)) == closed_form_58(primes)
    for _ in range(100):
        chosen = rng.sample(odd, rng.randint(0, 5))
        cut = rng.randint(0, len(chosen))
        a, b = chosen[:cut], chosen[cut:]
        schinzel_ok += entanglement(ProblemSpec.schinzel(a, b)) == schinzel_closed_form(a, b)
    ok = rank_ok == multi_ok == schinzel_ok == 100
    _report(4, ok, f"rank-r {rank_ok}/100, product form {multi_ok}/100, split primes {schinzel_ok}/100")


def test_criterion_5_vanishing():
    quad = ProblemSpec.multi([5, -15, 600, 1029])
    verdict = vanishing_verdict(quad)
    rep = empirical_density(quad, 10**6, threads=4, predicted=0.0)
    naive = vanishing_verdict(ProblemSpec.multi([2, 3, 6]))
    ok = verdict.kind == "entanglement_zero" and rep.qualifying == 0 and rep.eligible > 0 and naive.kind == "naive_zero"
    _report(
        5,
        ok,
        f"quadruple {verdict.kind}, {rep.qualifying} of {rep.eligible} primes below 10^6; (2,3,6) {naive.kind}",
    )


def test_criterion_6_rank_one_series():
    worst = mpf(0)
    for a in (2, 3, 5, 6, 7, 10):
        series = rank1_inclusion_exclusion(a, 10**4)
        exact = total_density(ProblemSpec.rank_r([a]), 20)
        with mp.workdps(30):
            worst = max(worst, abs(series.value - exact.total))
    _report(6, worst < mpf(10) ** -3, f"largest difference {mp.nstr(worst, 3)}")


def test_criterion_7_sieve_agreement():
    cases = [
        (ProblemSpec.rank_r([2]), 0.005),
        (ProblemSpec.rank_r([5]), 0.005),
        (ProblemSpec.multi([3, 5]), 0.01),
    ]
    start = time.perf_counter()
    parts, ok = [], True
    for prob, tol in cases:
        rep = empirical_density(prob, 10**7, threads=4)
        ok &= abs(rep.deviation) <= tol
        parts.append(f"{prob.describe()} {rep.observed:.5f} vs {rep.predicted:.5f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    _report(7, ok, "; ".join(parts) + f"; {elapsed:.1f} s")


def test_criterion_8_invariance():
    rng = random.Random(SEED + 8)
    sign_ok = gen_ok = 0
    for _ in range(100):
        prob = _random_any(rng)
        classes = square_classes(prob.lattice)
        _, weight = two_adic_character(prob)
        locals_ = {p: local_data(prob, p) for p in critical_primes(prob.lattice) if p != 2}
        flipped = [-b for b in classes]
        sign_ok += character_sum_engine(flipped, weight, locals_) == character_sum_engine(classes, weight, locals_)
    for _ in range(100):
        prob = _random_rank_r(rng)
        mixed = ProblemSpec.rank_r(unimodular_mix(prob.gens, rng))
        a, b = total_density(prob), total_density(mixed)
        gen_ok += (a.rho, a.family.q_coeffs, a.entanglement, a.total) == (b.rho, b.family.q_coeffs, b.entanglement, b.total)
    kp_ok = 0
    for _ in range(50):
        gens = [random_rational(rng, (2, 3, 5, 7, 11)) for _ in range(rng.randint(1, 4))]
        lat = build_lattice(gens)
        marked = sorted(rng.sample(range(len(gens)), rng.randint(1, len(gens))))
        kp_ok += all(kernel_union_count(lat, marked, p) == k_p(lat, marked, p) for p in (2, 3, 5, 7))
    ok = sign_ok == gen_ok == 100 and kp_ok == 50
    _report(8, ok, f"b <-> -b {sign_ok}/100, generator change {gen_ok}/100, kernel counts {kp_ok}/50")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
