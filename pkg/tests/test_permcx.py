from math import factorial

import pytest

from finkoszul.chaincx import cohomology
from finkoszul.cosimp import build_normalized
from finkoszul.errors import BudgetExceededError, InvalidInputError, ValidationError
from finkoszul.fikoszul import UNIT
from finkoszul.permcx import (
    build_cperm,
    codim2_face_count,
    cohomology_concentration,
    cperm_as_normalized_label,
    differ_by_adjacent_transposition,
    full_flags,
    share_upper_bound,
)
from finkoszul.setcomb import OrderedPartition, SubsetMask, enumerate_ordered_partitions, refinement_leq, stirling2


def test_dims_are_ordered_partition_counts():
    assert build_cperm(SubsetMask.full(4)).dims() == {1: 1, 2: 14, 3: 36, 4: 24}
    for n in range(1, 6):
        dims = build_cperm(SubsetMask.full(n)).dims()
        assert dims == {t: factorial(t) * stirling2(n, t) for t in range(1, n + 1)}


def test_empty_set():
    c = build_cperm(SubsetMask(0, 0))
    assert cohomology(c).nonzero() == {0: 1}


@pytest.mark.parametrize("n", range(1, 7))
def test_cohomology_concentrated_in_top_degree(n):
    assert {t: r for t, r in cohomology_concentration(SubsetMask.full(n)).items() if r} == {n: 1}


def test_subset_of_larger_ground_set():
    x = SubsetMask.from_elements([2, 4, 5], 6)
    ranks = cohomology(build_cperm(x)).nonzero()
    assert ranks == {3: 1}


@pytest.mark.parametrize("n", range(1, 6))
def test_matches_normalized_unit_complex(n):
    c = build_cperm(SubsetMask.full(n))
    nc = build_normalized(UNIT, n)
    assert nc.dim(0) == 0
    for t in range(1, n + 1):
        assert tuple(cperm_as_normalized_label(p) for p in c.basis[t]) == nc.basis[t]
    for t in range(1, n):
        assert c.d(t) == nc.d(t)


@pytest.mark.parametrize("n", range(2, 6))
def test_codim2_intervals_have_two_midpoints(n):
    x = SubsetMask.full(n)
    for k in range(1, n - 1):
        for p in enumerate_ordered_partitions(x, k):
            for r in enumerate_ordered_partitions(x, k + 2):
                if refinement_leq(r, p):
                    assert codim2_face_count(p, r) == 2


def test_codim2_precondition():
    x = SubsetMask.full(3)
    p = enumerate_ordered_partitions(x, 1)[0]
    q = enumerate_ordered_partitions(x, 2)[0]
    with pytest.raises(InvalidInputError):
        codim2_face_count(p, q)


@pytest.mark.parametrize("n", range(2, 5))
def test_permutohedron_edges_are_adjacent_transpositions(n):
    flags = full_flags(SubsetMask.full(n))
    assert len(flags) == factorial(n)
    for q in flags:
        for r in flags:
            if q != r:
                assert share_upper_bound(q, r) == differ_by_adjacent_transposition(q, r)


def test_budget():
    with pytest.raises(BudgetExceededError):
        build_cperm(SubsetMask.full(8))
    with pytest.raises(BudgetExceededError):
        cohomology_concentration(SubsetMask.full(5), max_x=4)
