import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkmgraphs.errors import DimensionError, InexactDivision
from gkmgraphs.polynomials import (
    IntPolynomial,
    divide_exact,
    divide_exact_by_linear,
    graded_piece_basis,
    poly_mul,
)


def x(i, n=2):
    return IntPolynomial.variable(n, i)


def test_product_of_sum_and_difference():
    assert poly_mul(x(0) + x(1), x(0) - x(1)) == x(0) ** 2 - x(1) ** 2


def test_multiplication_by_zero_and_one():
    p = 3 * x(0) ** 2 - x(1) + 7
    assert poly_mul(p, IntPolynomial.zero(2)).is_zero()
    assert poly_mul(p, IntPolynomial.constant(2, 1)) == p


def test_variable_table_mismatch():
    with pytest.raises(DimensionError):
        poly_mul(IntPolynomial.variable(2, 0), IntPolynomial.variable(3, 0))


def test_degree_additivity():
    p = x(0) ** 3 + x(1)
    q = x(1) ** 2 - 5
    assert poly_mul(p, q).degree() == p.degree() + q.degree()


monos = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monos, st.integers(-8, 8), max_size=5).map(
    lambda d: IntPolynomial(2, d)
)


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)


def test_graded_piece_basis_examples():
    assert graded_piece_basis(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert graded_piece_basis(4, 0) == [(0, 0, 0, 0)]
    assert len(graded_piece_basis(3, 4)) == 15


def test_graded_piece_basis_counts_match_binomial():
    for nvars in range(1, 7):
        for degree in range(0, 9):
            got = graded_piece_basis(nvars, degree)
            assert len(got) == math.comb(nvars + degree - 1, degree)
            assert got == sorted(got, reverse=True)
            assert all(sum(m) == degree for m in got)


def test_divide_exact_by_linear_roundtrip():
    p = (2 * x(0) - 3 * x(1) + 1) ** 2
    form = (1, -4)
    q = divide_exact_by_linear(p * IntPolynomial.linear_form(form), form)
    assert q == p


def test_divide_exact_by_linear_detects_nondivisibility():
    assert divide_exact_by_linear(x(0) * x(0), (0, 1)) is None
    assert divide_exact_by_linear(x(0) + 1, (1, 0)) is None


def test_divide_exact_by_linear_with_content():
    p = 6 * x(0) ** 2
    assert divide_exact_by_linear(p, (2, 0)) == 3 * x(0)
    assert divide_exact_by_linear(x(0), (2, 0)) is None


def test_divide_exact_multiple_factors():
    p = (x(0) - x(1)) * (x(0) + 2 * x(1)) * (5 - x(1))
    q = divide_exact(p, [(1, -1), (1, 2)])
    assert q == 5 - x(1)
    with pytest.raises(InexactDivision):
        divide_exact(p, [(1, 1)])


def test_substitute_and_evaluate():
    p = x(0) ** 2 + 3 * x(1)
    swapped = p.substitute([x(1), x(0)])
    assert swapped == x(1) ** 2 + 3 * x(0)
    assert p.evaluate((2, 5)) == 4 + 15


def test_to_string_is_lex_descending():
    p = x(1) + x(0) ** 2 - 4
    assert p.to_string() == "t1^2 + t2 - 4"
    assert p.to_string(["a", "b"]) == "a^2 + b - 4"
    assert IntPolynomial.zero(2).to_string() == "0"
