from itertools import combinations, permutations, product
from math import factorial

import pytest
from hypothesis import given, strategies as st
from sympy.functions.combinatorial.numbers import stirling

from finkoszul.errors import InvalidInputError
from finkoszul.setcomb import (
    OrderedPartition,
    SubsetMask,
    Surjection,
    count_surjections,
    enumerate_ordered_partitions,
    enumerate_surjections,
    full_mask,
    mask_elements,
    mask_from_elements,
    ordered_bell,
    ordered_partition_blocks,
    permutation_sign,
    refinement_leq,
    restrict_surjection,
    stirling2,
    submasks,
    subsets_of_size,
    surjection_index,
    surjection_table,
    wedge_insert,
    wedge_sign,
    wedge_word_sign,
)


def inversion_sign(seq):
    inv = sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


# -- subsets ------------------------------------------------------------------

def test_mask_roundtrip_small():
    assert mask_elements(0b1011) == (1, 2, 4)
    assert mask_from_elements([4, 1, 2]) == 0b1011
    assert full_mask(3) == 0b111


@given(st.sets(st.integers(1, 16)))
def test_mask_roundtrip(elems):
    assert set(mask_elements(mask_from_elements(elems))) == elems


def test_subsets_of_size_counts():
    for n in range(7):
        for k in range(n + 1):
            subs = subsets_of_size(n, k)
            assert len(subs) == len(set(subs)) == len(list(combinations(range(n), k)))
            assert list(subs) == sorted(subs, reverse=True)


def test_submasks_all_and_decreasing():
    subs = list(submasks(0b1101))
    assert subs == sorted(subs, reverse=True)
    assert set(subs) == {s for s in range(16) if s & ~0b1101 == 0}


def test_subset_mask_complement():
    s = SubsetMask.from_elements([1, 3], 4)
    assert s.complement().elements() == (2, 4)
    assert len(s) == 2 and 3 in s and 2 not in s


def test_subset_mask_rejects_out_of_range():
    with pytest.raises(InvalidInputError):
        SubsetMask(0b10000, 4)


# -- signs --------------------------------------------------------------------

@given(st.permutations(list(range(7))))
def test_permutation_sign_matches_inversions(seq):
    assert permutation_sign(seq) == inversion_sign(seq)


def test_wedge_sign_counts_smaller_elements():
    assert wedge_sign(3, mask_from_elements([1, 4])) == -1
    assert wedge_sign(1, mask_from_elements([2, 4])) == 1
    assert wedge_sign(5, mask_from_elements([1, 2, 4])) == -1


@given(st.sets(st.integers(1, 8), max_size=7), st.integers(1, 8))
def test_wedge_insert_matches_word_sign(elems, x):
    s = SubsetMask.from_elements(elems, 8)
    if x in elems:
        with pytest.raises(InvalidInputError):
            wedge_insert(x, s)
        return
    sign, new = wedge_insert(x, s)
    assert new.elements() == tuple(sorted(elems | {x}))
    assert sign == wedge_word_sign([x] + sorted(elems))


def test_wedge_insert_out_of_range():
    with pytest.raises(InvalidInputError):
        wedge_insert(5, SubsetMask(0, 4))


def test_wedge_word_sign_repeat_is_zero():
    assert wedge_word_sign([2, 1, 2]) == 0
    assert wedge_word_sign([2, 1]) == -1


# -- surjections --------------------------------------------------------------

@pytest.mark.parametrize("n", range(9))
def test_stirling_against_sympy(n):
    for k in range(n + 1):
        assert stirling2(n, k) == int(stirling(n, k))


def test_surjection_table_brute_force():
    for b in range(6):
        for a in range(b + 2):
            rows, index = surjection_table(b, a)
            brute = [v for v in product(range(1, a + 1), repeat=b) if set(v) == set(range(1, a + 1))]
            assert list(rows) == brute
            assert len(rows) == count_surjections(b, a)
            assert all(index[v] == i for i, v in enumerate(rows))


def test_surjection_edge_cases():
    assert surjection_table(0, 0)[0] == ((),)
    assert surjection_table(3, 0)[0] == ()
    assert surjection_table(2, 3)[0] == ()
    assert count_surjections(4, 3) == 36


def test_surjection_validation():
    with pytest.raises(InvalidInputError):
        Surjection((1, 1, 3), 3)
    with pytest.raises(InvalidInputError):
        surjection_table(-1, 2)


def test_fibres_and_index():
    f = Surjection((2, 1, 2, 3), 3)
    assert f.fibres() == (0b0010, 0b0101, 0b1000)
    assert enumerate_surjections(4, 3)[surjection_index(f)] == f


def test_restriction():
    f = Surjection((2, 1, 2, 3), 3)
    assert restrict_surjection(f, SubsetMask.from_elements([2, 3, 4], 4)) == Surjection((1, 2, 3), 3)
    assert restrict_surjection(f, SubsetMask.from_elements([1, 2, 3], 4)) is None
    with pytest.raises(InvalidInputError):
        restrict_surjection(f, SubsetMask.full(5))


@given(st.integers(1, 5).flatmap(lambda a: st.tuples(st.just(a), st.integers(a, 7))),
       st.data())
def test_restriction_composes(ab, data):
    a, b = ab
    rows, _ = surjection_table(b, a)
    f = Surjection(data.draw(st.sampled_from(rows)), a)
    inner = data.draw(st.integers(0, full_mask(b)))
    outer = data.draw(st.integers(0, full_mask(b))) | inner
    direct = restrict_surjection(f, SubsetMask(inner, b))
    step = restrict_surjection(f, SubsetMask(outer, b))
    if step is None:
        assert direct is None
        return
    # positions of inner inside outer
    rel = [i + 1 for i, e in enumerate(mask_elements(outer)) if inner >> (e - 1) & 1]
    two_step = restrict_surjection(step, SubsetMask.from_elements(rel, len(step.values)))
    assert two_step == direct


def test_ordered_bell():
    assert [ordered_bell(n) for n in range(7)] == [1, 1, 3, 13, 75, 541, 4683]


# -- ordered partitions -------------------------------------------------------

def test_ordered_partition_validation():
    with pytest.raises(InvalidInputError):
        OrderedPartition((0b1, 0b11), 2)
    with pytest.raises(InvalidInputError):
        OrderedPartition((0b1, 0), 2)
    with pytest.raises(InvalidInputError):
        OrderedPartition((), 2)


def test_ordered_partition_key_is_injective():
    # minimum elements per block would collide here
    p = OrderedPartition.from_lists([[1, 3], [2]], 3)
    q = OrderedPartition.from_lists([[1], [2, 3]], 3)
    assert p.key() != q.key()
    keys = [p.key() for t in range(1, 5) for p in enumerate_ordered_partitions(SubsetMask.full(4), t)]
    assert len(keys) == len(set(keys)) == ordered_bell(4)


def test_ordered_partition_blocks_counts():
    for n in range(1, 6):
        for t in range(1, n + 1):
            assert len(ordered_partition_blocks(full_mask(n), t)) == factorial(t) * stirling2(n, t)


def _brute_refines(q, p):
    # q <= p iff some monotone surjection of block indices merges q into p
    for cuts in combinations(range(1, len(q)), len(p) - 1):
        bounds = (0,) + cuts + (len(q),)
        merged = []
        for i in range(len(p)):
            acc = 0
            for blk in q.blocks[bounds[i]:bounds[i + 1]]:
                acc |= blk
            merged.append(acc)
        if tuple(merged) == p.blocks:
            return True
    return False


def test_refinement_against_brute_force():
    x = SubsetMask.full(4)
    parts = [p for t in range(1, 5) for p in enumerate_ordered_partitions(x, t)]
    for q in parts:
        for p in parts:
            assert refinement_leq(q, p) == _brute_refines(q, p)


def test_refinement_is_partial_order():
    x = SubsetMask.full(3)
    parts = [p for t in range(1, 4) for p in enumerate_ordered_partitions(x, t)]
    for p in parts:
        assert refinement_leq(p, p)
        for q in parts:
            if p != q and refinement_leq(p, q):
                assert not refinement_leq(q, p)
            for r in parts:
                if refinement_leq(p, q) and refinement_leq(q, r):
                    assert refinement_leq(p, r)


def test_refinement_ground_mismatch():
    with pytest.raises(InvalidInputError):
        refinement_leq(OrderedPartition((1,), 2), OrderedPartition((3,), 2))


def test_full_flags_are_permutations():
    x = SubsetMask.full(4)
    flags = enumerate_ordered_partitions(x, 4)
    assert sorted(tuple(e for blk in p.as_lists() for e in blk) for p in flags) == sorted(permutations(range(1, 5)))
