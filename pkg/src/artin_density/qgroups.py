"""Finitely generated subgroups of the multiplicative group of the rationals.

A subgroup is stored through the exponent vectors of its generators over
their joint prime support, plus one sign bit per generator.  Everything the
density computations need (free rank, images modulo ``p``-th powers, square
classes, sign homomorphisms) is exact linear algebra over ``Z`` or ``F_p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .smith import SmithForm, smith_normal_form

Rational = Union[int, Fraction, str]

DEFAULT_TRIAL_BOUND = 10**6
DEFAULT_CLASS_RANK_BOUND = 20

# Deterministic Miller-Rabin witnesses, valid below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


class FactoringBudgetError(ValueError):
    """A cofactor could not be certified within the trial-division budget."""


class ClassEnumerationError(ValueError):
    """Refused to enumerate too many square classes."""


# --------------------------------------------------------------------------
# primes and factoring
# --------------------------------------------------------------------------

@lru_cache(maxsize=8)
def small_primes(bound: int) -> np.ndarray:
    """All primes ``<= bound`` as an int64 array (plain Eratosthenes)."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(bound) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def is_prime(n: int) -> bool:
    """Deterministic primality test for ``n`` below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise FactoringBudgetError(f"cannot certify primality of {n}: above the deterministic range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_int(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND) -> Dict[int, int]:
    """Factor a positive integer by trial division up to ``trial_bound``.

    A leftover cofactor above ``trial_bound**2`` must pass a deterministic
    primality test; otherwise :class:`FactoringBudgetError` is raised.
    """
    if n < 1:
        raise ValueError("factor_int expects a positive integer")
    out: Dict[int, int] = {}
    if n == 1:
        return out
    limit = min(trial_bound, math.isqrt(n))
    primes = small_primes(trial_bound)
    primes = primes[: np.searchsorted(primes, limit, side="right")]
    if n < 2**62:
        hits = primes[(n % primes) == 0] if len(primes) else primes
        for p in hits.tolist():
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    else:
        for p in primes.tolist():
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
    if n > 1:
        if n > trial_bound * trial_bound and not is_prime(n):
            raise FactoringBudgetError(
                f"composite cofactor {n} has no prime factor below the trial bound {trial_bound}"
            )
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_kernel(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise ValueError("zero has no squarefree kernel")
    k = -1 if n < 0 else 1
    for p, e in factor_int(abs(n)).items():
        if e % 2:
            k *= p
    return k


def parse_rational(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


# --------------------------------------------------------------------------
# factored rationals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FactoredRational:
    """Nonzero rational ``sign * prod(p**e)``; no stored exponent is zero."""

    sign: int
    exponents: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if any(e == 0 for _, e in self.exponents):
            raise ValueError("zero exponents are not stored")

    @property
    def as_dict(self) -> Dict[int, int]:
        return dict(self.exponents)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.exponents)

    def value(self) -> Fraction:
        num, den = 1, 1
        for p, e in self.exponents:
            if e > 0:
                num *= p**e
            else:
                den *= p ** (-e)
        return Fraction(self.sign * num, den)

    def __str__(self) -> str:
        return str(self.value())


def factor_rational(x: Rational, trial_bound: int = DEFAULT_TRIAL_BOUND) -> FactoredRational:
    """Exact factorization; denominator primes get negative exponents.

    >>> factor_rational(Fraction(4, 9)).as_dict
    {2: 2, 3: -2}
    """
    q = parse_rational(x)
    if q == 0:
        raise ValueError("zero is not an element of Q*")
    exps = dict(factor_int(abs(q.numerator), trial_bound))
    for p, e in factor_int(q.denominator, trial_bound).items():
        exps[p] = -e
    return FactoredRational(1 if q > 0 else -1, tuple(sorted(exps.items())))


# --------------------------------------------------------------------------
# linear algebra over F_p
# --------------------------------------------------------------------------

def rref_mod_p(rows: Sequence[Sequence[int]], p: int, ncols: int) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form over ``F_p``; returns (nonzero rows, pivot columns)."""
    m = [[x % p for x in row] for row in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


@dataclass(frozen=True)
class ModPImage:
    """Image of a subgroup in ``Q*/Q*^p`` as a row space over ``F_p``.

    At ``p = 2`` coordinate 0 is the sign bit and the remaining coordinates
    follow the lattice's support primes; at odd ``p`` there is no sign
    coordinate since ``-1`` is a ``p``-th power.
    """

    p: int
    basis: Tuple[Tuple[int, ...], ...]
    pivots: Tuple[int, ...]
    rank: int

    @property
    def size(self) -> int:
        return self.p**self.rank

    def coordinates(self, vector: Sequence[int]) -> Tuple[int, ...]:
        """Coordinates of ``vector`` in the echelon basis; it must lie in the span."""
        coords = tuple(vector[c] % self.p for c in self.pivots)
        recon = [0] * len(vector)
        for a, row in zip(coords, self.basis):
            for j, x in enumerate(row):
                recon[j] = (recon[j] + a * x) % self.p
        if any((x - y) % self.p for x, y in zip(recon, vector)):
            raise ValueError("vector is not in the image")
        return coords


# --------------------------------------------------------------------------
# square classes
# --------------------------------------------------------------------------

def discriminant(rep: int) -> int:
    """Discriminant of ``Q(sqrt(rep))`` for a squarefree ``rep != 0``.

    The trivial class ``rep = 1`` gets discriminant 1.
    """
    if rep == 0:
        raise ValueError("0 is not a square class")
    return rep if rep % 4 == 1 else 4 * rep


@dataclass(frozen=True, order=True)
class SquareClass:
    rep: int
    disc: int = field(compare=False)

    @classmethod
    def of(cls, x: Rational) -> "SquareClass":
        q = parse_rational(x)
        k = squarefree_kernel(q.numerator * q.denominator)
        return cls(k, discriminant(k))

    @property
    def is_identity(self) -> bool:
        return self.rep == 1

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        g = math.gcd(self.rep, other.rep)
        k = (self.rep // g) * (other.rep // g)
        return SquareClass(k, discriminant(k))

    def __neg__(self) -> "SquareClass":
        return SquareClass(-self.rep, discriminant(-self.rep))

    def __str__(self) -> str:
        return str(self.rep)


# --------------------------------------------------------------------------
# exponent lattices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentLattice:
    generators: Tuple[FactoredRational, ...]
    primes: Tuple[int, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    sign_column: Tuple[int, ...]
    smith: SmithForm

    @property
    def free_rank(self) -> int:
        return self.smith.rank

    @property
    def elementary_divisors(self) -> Tuple[int, ...]:
        return self.smith.elementary_divisors

    def __len__(self) -> int:
        return len(self.generators)

    def vector(self, i: int, p: int) -> Tuple[int, ...]:
        """Exponent vector of generator ``i`` as used for the mod-``p`` image."""
        row = self.matrix[i]
        if p == 2:
            return (self.sign_column[i],) + row
        return row

    def class_vector(self, rep: int) -> Tuple[int, ...]:
        """Mod-2 coordinates (sign bit first) of a squarefree integer over this support."""
        vec = [1 if rep < 0 else 0] + [0] * len(self.primes)
        rest = abs(rep)
        for j, p in enumerate(self.primes):
            if rest % p == 0:
                vec[j + 1] = 1
                rest //= p
        if rest != 1:
            raise ValueError(f"{rep} is not supported on {self.primes}")
        return tuple(vec)

    def class_of_vector(self, vec: Sequence[int]) -> SquareClass:
        rep = -1 if vec[0] % 2 else 1
        for bit, p in zip(vec[1:], self.primes):
            if bit % 2:
                rep *= p
        return SquareClass(rep, discriminant(rep))

    def sublattice(self, subset: Iterable[int]) -> "ExponentLattice":
        idx = sorted(set(subset))
        return build_lattice([self.generators[i] for i in idx])


def build_lattice(gens: Sequence[Union[FactoredRational, Rational]]) -> ExponentLattice:
    """Exponent lattice of the group generated by ``gens``.

    >>> build_lattice([8]).elementary_divisors
    (3,)
    """
    if not gens:
        raise ValueError("need at least one generator")
    fgens = tuple(g if isinstance(g, FactoredRational) else factor_rational(g) for g in gens)
    primes = tuple(sorted({p for g in fgens for p in g.support}))
    matrix = tuple(tuple(g.as_dict.get(p, 0) for p in primes) for g in fgens)
    signs = tuple(0 if g.sign > 0 else 1 for g in fgens)
    snf = smith_normal_form(matrix, ncols=len(primes))
    return ExponentLattice(fgens, primes, matrix, signs, snf)


def mod_p_image(lattice: ExponentLattice, p: int, subset: Optional[Iterable[int]] = None) -> ModPImage:
    """Image in ``Q*/Q*^p`` of the subgroup generated by ``subset`` (default: all)."""
    idx = range(len(lattice)) if subset is None else sorted(set(subset))
    rows = [lattice.vector(i, p) for i in idx]
    ncols = len(lattice.primes) + (1 if p == 2 else 0)
    basis, pivots = rref_mod_p(rows, p, ncols)
    return ModPImage(p, tuple(tuple(r) for r in basis), tuple(pivots), len(basis))


def _span(basis: Sequence[Sequence[int]], p: int, ncols: int) -> Iterator[Tuple[int, ...]]:
    for coeffs in product(range(p), repeat=len(basis)):
        v = [0] * ncols
        for c, row in zip(coeffs, basis):
            if c:
                for j, x in enumerate(row):
                    v[j] = (v[j] + c * x) % p
        yield tuple(v)


def square_classes(lattice: ExponentLattice, rank_bound: int = DEFAULT_CLASS_RANK_BOUND) -> List[SquareClass]:
    """All classes of the image of the lattice in ``Q*/Q*^2``; identity first."""
    img = mod_p_image(lattice, 2)
    if img.rank > rank_bound:
        raise ClassEnumerationError(f"2-rank {img.rank} exceeds the enumeration bound {rank_bound}")
    ncols = len(lattice.primes) + 1
    return [lattice.class_of_vector(v) for v in _span(img.basis, 2, ncols)]


def critical_primes(lattice: ExponentLattice) -> Tuple[int, ...]:
    """2 together with the odd primes dividing the discriminant of some square class."""
    odd = {
        p
        for j, p in enumerate(lattice.primes)
        if p != 2 and any(row[j] % 2 for row in lattice.matrix)
    }
    return tuple(sorted(odd | {2}))


# --------------------------------------------------------------------------
# sign homomorphisms on square classes
# --------------------------------------------------------------------------

def _class_bits(rep: int, primes: Sequence[int]) -> int:
    bits = 1 if rep < 0 else 0
    rest = abs(rep)
    for j, p in enumerate(primes):
        if rest % p == 0:
            bits |= 1 << (j + 1)
            rest //= p
    if rest != 1:
        raise ValueError(f"{rep} is not a squarefree product of {primes}")
    return bits


def _support(reps: Iterable[int]) -> Tuple[int, ...]:
    primes = set()
    for r in reps:
        primes.update(factor_int(abs(r)))
    return tuple(sorted(primes))


def _eliminate(vectors: Sequence[int], targets: Sequence[int]):
    """Gaussian elimination over F_2 on bitmask rows with augmented target bits.

    Returns (pivot rows, obstruction) where each pivot row is a tuple
    (pivot bit, vector, target, constraint subset mask).  ``obstruction`` is a
    constraint subset mask whose product is trivial but whose targets multiply
    to -1, or ``None``.
    """
    rows: List[Tuple[int, int, int, int]] = []
    for i, (v, t) in enumerate(zip(vectors, targets)):
        combo = 1 << i
        for piv, rv, rt, rc in rows:
            if v & piv:
                v ^= rv
                t ^= rt
                combo ^= rc
        if v == 0:
            if t:
                return rows, combo
            continue
        piv = v & -v
        # keep earlier rows reduced at the new pivot
        rows = [(pb, rv ^ v, rt ^ t, rc ^ combo) if rv & piv else (pb, rv, rt, rc) for pb, rv, rt, rc in rows]
        rows.append((piv, v, t, combo))
    return rows, None


class SignHomomorphism:
    """A homomorphism from a group of square classes to ``{+1, -1}``."""

    def __init__(self, primes: Tuple[int, ...], rows: Sequence[Tuple[int, int, int, int]]):
        self._primes = primes
        self._rows = list(rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def __call__(self, c: Union[SquareClass, int]) -> int:
        rep = c.rep if isinstance(c, SquareClass) else int(c)
        v = _class_bits(rep, self._primes)
        t = 0
        for piv, rv, rt, _ in self._rows:
            if v & piv:
                v ^= rv
                t ^= rt
        if v:
            raise ValueError(f"class {rep} is outside the domain of this homomorphism")
        return -1 if t else 1

    def table(self) -> Dict[int, int]:
        """Value on every class of the domain, keyed by representative."""
        out = {}
        for mask in range(1 << len(self._rows)):
            v, t = 0, 0
            for k, (_, rv, rt, _) in enumerate(self._rows):
                if mask >> k & 1:
                    v ^= rv
                    t ^= rt
            rep = -1 if v & 1 else 1
            for j, p in enumerate(self._primes):
                if v >> (j + 1) & 1:
                    rep *= p
            out[rep] = -1 if t else 1
        return out


def _constraint_reps(constraints: Sequence[Tuple[Union[SquareClass, int], int]]) -> List[int]:
    return [c.rep if isinstance(c, SquareClass) else squarefree_kernel(int(c)) for c, _ in constraints]


def sign_obstruction(constraints: Sequence[Tuple[Union[SquareClass, int], int]]) -> Optional[Tuple[int, ...]]:
    """Indices of constraints whose classes multiply to 1 but whose targets multiply to -1."""
    reps = _constraint_reps(constraints)
    primes = _support(reps)
    vecs = [_class_bits(r, primes) for r in reps]
    tbits = [0 if t == 1 else 1 for _, t in constraints]
    _, obstruction = _eliminate(vecs, tbits)
    if obstruction is None:
        return None
    return tuple(i for i in range(len(constraints)) if obstruction >> i & 1)


def sign_solve(constraints: Sequence[Tuple[Union[SquareClass, int], int]]) -> Optional[SignHomomorphism]:
    """The homomorphism on the span of the constraint classes taking the prescribed values.

    Returns ``None`` when an F_2-relation among the classes contradicts the
    targets.
    """
    for _, t in constraints:
        if t not in (1, -1):
            raise ValueError("targets must be +1 or -1")
    reps = _constraint_reps(constraints)
    primes = _support(reps)
    vecs = [_class_bits(r, primes) for r in reps]
    tbits = [0 if t == 1 else 1 for _, t in constraints]
    rows, obstruction = _eliminate(vecs, tbits)
    if obstruction is not None:
        return None
    return SignHomomorphism(primes, rows)
