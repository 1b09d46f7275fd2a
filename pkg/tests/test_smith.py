from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from artin_density.smith import determinant, matmul, smith_normal_form

matrices = st.integers(1, 4).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda m: st.lists(st.lists(st.integers(-12, 12), min_size=m, max_size=m), min_size=n, max_size=n)
    )
)


def _diag(d, n, m):
    return [[d[i] if i == j and i < len(d) else 0 for j in range(m)] for i in range(n)]


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_transforms_reproduce_diagonal(a):
    n, m = len(a), len(a[0])
    snf = smith_normal_form(a)
    assert matmul(matmul(snf.left, a), snf.right) == _diag(snf.diagonal, n, m)
    assert abs(determinant(snf.left)) == 1
    assert abs(determinant(snf.right)) == 1


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_divisor_chain_matches_sympy(a):
    snf = smith_normal_form(a)
    divs = snf.elementary_divisors
    assert all(d > 0 for d in divs)
    assert all(divs[i + 1] % divs[i] == 0 for i in range(len(divs) - 1))
    ref = sympy_snf(Matrix(a), domain=ZZ)
    ref_divs = sorted(abs(int(ref[i, i])) for i in range(min(ref.shape)) if ref[i, i] != 0)
    assert sorted(divs) == ref_divs


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4))
@settings(max_examples=100, deadline=None)
def test_determinant_matches_sympy(a):
    assert determinant(a) == Matrix(a).det()


def test_zero_row_matrix_needs_width():
    snf = smith_normal_form([], ncols=3)
    assert snf.rank == 0
    assert len(snf.right) == 3
