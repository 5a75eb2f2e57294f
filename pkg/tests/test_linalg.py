from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from foliacalc.linalg import determinant, matmul, nullspace, rank, rref, solve

entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def matrices(draw, max_rows: int = 6, max_cols: int = 6):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    # sparse-ish so that rank deficiency actually occurs
    cell = st.one_of(st.just(Fraction(0)), st.just(Fraction(0)), entries)
    return [[draw(cell) for _ in range(cols)] for _ in range(rows)], cols


def to_sympy(m):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_agrees_with_sympy(case):
    m, _ = case
    assert rank(m) == to_sympy(m).rank()


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_nullspace_is_a_kernel_basis(case):
    m, cols = case
    kernel = nullspace(m, cols)
    assert len(kernel) == cols - to_sympy(m).rank()
    for v in kernel:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    if kernel:
        assert rank(kernel) == len(kernel)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_solve_finds_a_preimage_when_one_exists(case, data):
    m, cols = case
    x = [data.draw(entries) for _ in range(cols)]
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    y = solve(m, rhs, cols)
    assert y is not None
    assert [sum(a * b for a, b in zip(row, y)) for row in m] == rhs


def test_solve_reports_inconsistency():
    m = [[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]]
    assert solve(m, [Fraction(1), Fraction(3)], 2) is None


def test_rref_pivots():
    m = [[Fraction(0), Fraction(2), Fraction(4)], [Fraction(1), Fraction(1), Fraction(1)]]
    reduced, pivots = rref(m)
    assert pivots == [0, 1]
    assert reduced[0] == [1, 0, -1]
    assert reduced[1] == [0, 1, 2]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5).flatmap(lambda k: st.lists(st.lists(entries, min_size=k, max_size=k), min_size=k, max_size=k)))
def test_determinant_agrees_with_sympy(m):
    assert determinant(m) == to_sympy(m).det()


def test_matmul():
    a = [[Fraction(1), Fraction(2)]]
    b = [[Fraction(3)], [Fraction(4)]]
    assert matmul(a, b, 2, 1) == [[Fraction(11)]]
