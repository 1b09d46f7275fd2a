"""Deciding whether a multiple primitive root problem has density zero."""
from __future__ import annotations

from itertools import combinations, product
from typing import List, Optional, Tuple

from ..qgroups import SquareClass, mod_p_image, rref_mod_p, sign_solve
from .local import naive_zero_witness, sign_constraints
from .problem import Kind, ProblemSpec, Verdict

MINUS_THREE = SquareClass.of(-3)


def _subset_product_equal(problem: ProblemSpec, target: SquareClass) -> Optional[Tuple[int, ...]]:
    classes = [SquareClass.of(a) for a in problem.gens]
    for size in range(1, len(classes) + 1):
        for sel in combinations(range(len(classes)), size):
            acc = SquareClass.of(1)
            for i in sel:
                acc = acc * classes[i]
            if acc == target:
                return sel
    return None


def cube_relations(problem: ProblemSpec) -> List[Tuple[int, ...]]:
    """Exponent vectors ``e`` (mod 3) with ``prod a_i^{e_i}`` a cube, as a basis."""
    lattice = problem.lattice
    n = len(lattice)
    width = len(lattice.primes)
    rows = [list(lattice.vector(i, 3)) + [int(i == j) for j in range(n)] for i in range(n)]
    reduced, pivots = rref_mod_p(rows, 3, width + n)
    return [tuple(row[width:]) for row, piv in zip(reduced, pivots) if piv >= width]


def all_cube_characters_kill(problem: ProblemSpec) -> bool:
    """True when every character of the image mod cubes is trivial on some ``a_i``."""
    lattice = problem.lattice
    image = mod_p_image(lattice, 3)
    coords = [image.coordinates(lattice.vector(i, 3)) for i in problem.marked]
    for chi in product(range(3), repeat=image.rank):
        if all(sum(c * x for c, x in zip(chi, v)) % 3 for v in coords):
            return False
    return True


def shortcut_applies(problem: ProblemSpec) -> bool:
    """Cheap sufficient condition for some cube character to be nontrivial on every ``a_i``."""
    lattice = problem.lattice
    n = len(problem.marked)
    if any(not any(x % 3 for x in lattice.vector(i, 3)) for i in problem.marked):
        return False
    rank3 = mod_p_image(lattice, 3).rank
    return n <= 3 or rank3 == 1 or rank3 >= n - 1


def _power(i: int, e: int) -> str:
    return f"a{i + 1}" if e == 1 else f"a{i + 1}^{e}"


def vanishing_verdict(problem: ProblemSpec) -> Verdict:
    if problem.kind is not Kind.MULTI:
        raise ValueError("vanishing_verdict expects a multiple primitive root problem")
    shortcut = shortcut_applies(problem)
    subset = naive_zero_witness(problem)
    if subset is not None:
        one_based = tuple(i + 1 for i in subset)
        names = "*".join(f"a{i}" for i in one_based)
        return Verdict(
            "naive_zero",
            (f"{names} is a square and the subset has odd size {len(one_based)}",),
            one_based,
            shortcut,
        )

    hom = sign_solve(sign_constraints(problem))
    try:
        sign = hom(MINUS_THREE)
    except ValueError:
        sign = None
    if sign == 1 and all_cube_characters_kill(problem):
        sel = _subset_product_equal(problem, MINUS_THREE)
        witnesses = [
            "-3 = " + "*".join(f"a{i + 1}" for i in sel) + " modulo squares",
            "the sign character is +1 on -3",
        ]
        for rel in cube_relations(problem):
            text = "*".join(_power(i, e) for i, e in enumerate(rel) if e)
            witnesses.append(f"{text} is a cube")
        witnesses.append("every character modulo cubes is trivial on some a_i")
        return Verdict("entanglement_zero", tuple(witnesses), tuple(i + 1 for i in sel), shortcut)
    return Verdict("positive", (), None, shortcut)
