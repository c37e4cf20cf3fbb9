from math import factorial

import pytest
from hypothesis import given, strategies as st

from finkoszul.chaincx import cohomology
from finkoszul.errors import BudgetExceededError, InvalidInputError
from finkoszul.fikoszul import build_C
from finkoszul.rkfun import (
    rk_cell,
    rk_closed_form,
    rk_euler,
    rk_kernel,
    rk_recursive,
    rk_table,
)


def test_boundary_values():
    assert rk_recursive(0, 0) == 1
    assert rk_recursive(2, 1) == 0
    assert rk_recursive(3, 0) == 0
    assert rk_recursive(2, 3) == 0
    assert rk_recursive(4, 3) == 13


def test_row_three():
    assert [rk_recursive(b, 3) for b in range(3, 8)] == [6, 13, 29, 61, 125]


@given(st.integers(2, 30).flatmap(lambda a: st.tuples(st.integers(a + 1, 40), st.just(a))))
def test_euler_equals_recursion(ba):
    b, a = ba
    assert rk_euler(b, a) == rk_recursive(b, a)


@given(st.integers(1, 25), st.integers(1, 25))
def test_closed_forms(b, a):
    closed = rk_closed_form(b, a)
    if closed is not None:
        assert closed == rk_recursive(b, a)


@pytest.mark.parametrize("b", range(0, 7))
def test_kernel_route(b):
    for a in range(0, b + 1):
        assert rk_kernel(b, a) == rk_recursive(b, a)


@pytest.mark.parametrize("b,a", [(4, 2), (5, 3), (6, 2)])
def test_h0_of_complex_is_rk(b, a):
    assert cohomology(build_C(b, a)).ranks[0] == rk_recursive(b, a)


def test_table():
    t = rk_table(5)
    assert t.all_agree
    assert t.row(3) == [None, None, None, 6, 13, 29]
    assert t.cells[(0, 0)].value == 1
    assert set(rk_cell(5, 3).methods) == {"recursive", "euler", "kernel", "closed_form"}


def test_errors():
    with pytest.raises(InvalidInputError):
        rk_euler(3, 3)
    with pytest.raises(InvalidInputError):
        rk_recursive(-1, 0)
    with pytest.raises(BudgetExceededError):
        rk_kernel(9, 3)


def test_diagonal_is_factorial():
    for a in range(0, 9):
        assert rk_recursive(a, a) == factorial(a)
