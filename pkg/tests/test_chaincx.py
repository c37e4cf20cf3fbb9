from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from finkoszul.chaincx import (
    ChainMap,
    CochainComplex,
    cohomology,
    cohomology_representatives,
    induced_rank,
    is_acyclic,
    mapping_cone,
    permute_basis,
    quasi_iso_check,
    shift,
    validate,
    validate_chain_map,
    verify_ses,
)
from finkoszul.errors import InvalidInputError, ValidationError
from finkoszul.exactla import SparseIntMatrix, multiply


def simplicial_cochains(facets, top=None) -> CochainComplex:
    """Simplicial cochain complex of the closure of ``facets``."""
    faces = set()
    for f in facets:
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            faces.update(combinations(f, k))
    top = max((len(s) for s in faces), default=0) - 1 if top is None else top
    basis = {t: tuple(sorted(s for s in faces if len(s) == t + 1)) for t in range(top + 1)}
    diff = {}
    for t in range(top):
        idx = {s: i for i, s in enumerate(basis[t])}
        entries = {}
        for row, s in enumerate(basis[t + 1]):
            for i in range(len(s)):
                entries[(row, idx[s[:i] + s[i + 1:]])] = (-1) ** i
        diff[t] = SparseIntMatrix(len(basis[t + 1]), len(basis[t]), entries)
    return CochainComplex(0, basis, diff, max_degree=top)


def restriction_map(big: CochainComplex, small: CochainComplex) -> ChainMap:
    maps = {}
    for t in big.degrees():
        idx = big.index(t)
        maps[t] = SparseIntMatrix(small.dim(t), big.dim(t),
                                  {(k, idx[s]): 1 for k, s in enumerate(small.basis.get(t, ()))})
    return ChainMap(big, small, maps)


SPHERE = [s for s in combinations(range(4), 3)]
SIMPLEX = [tuple(range(4))]
CIRCLE = [(0, 1), (1, 2), (0, 2)]


# -- complexes ---------------------------------------------------------------

def test_sphere_and_simplex_cohomology():
    assert cohomology(simplicial_cochains(SPHERE)).nonzero() == {0: 1, 2: 1}
    assert cohomology(simplicial_cochains(SIMPLEX)).nonzero() == {0: 1}
    assert cohomology(simplicial_cochains(CIRCLE)).nonzero() == {0: 1, 1: 1}


def test_snf_detects_torsion_free():
    rep = cohomology(simplicial_cochains(SPHERE), snf=True)
    assert all(rep.all_ones.values())
    # multiplication by 2 on Z: rationally acyclic, not all ones
    c = CochainComplex(0, {0: ("x",), 1: ("y",)}, {0: SparseIntMatrix(1, 1, {(0, 0): 2})})
    rep = cohomology(c, snf=True)
    assert rep.nonzero() == {} and rep.all_ones == {0: False}


def test_validate_rejects_nonzero_square():
    d0 = SparseIntMatrix(1, 1, {(0, 0): 1})
    with pytest.raises(ValidationError) as exc:
        CochainComplex(0, {0: ("a",), 1: ("b",), 2: ("c",)}, {0: d0, 1: d0})
    assert exc.value.degree == 0 and exc.value.witness == "a"


def test_shape_mismatch_rejected():
    with pytest.raises(InvalidInputError):
        CochainComplex(0, {0: ("a",), 1: ("b",)}, {0: SparseIntMatrix(2, 1)})


def test_empty_and_trimmed():
    e = CochainComplex.empty()
    assert e.is_empty() and cohomology(e).ranks == {}
    c = CochainComplex(0, {0: (), 1: ("x",), 2: ()}, max_degree=2)
    t = c.trimmed()
    assert (t.min_degree, t.max_degree) == (1, 1)


def test_shift_moves_cohomology():
    c = simplicial_cochains(CIRCLE)
    s = shift(c, 2)
    assert cohomology(s).nonzero() == {2: 1, 3: 1}
    assert s.dims() == {t + 2: d for t, d in c.dims().items()}
    assert s.euler() == c.euler()


def test_permute_basis_preserves_cohomology():
    c = simplicial_cochains(SPHERE)
    perm = list(reversed(range(c.dim(1))))
    p = permute_basis(c, 1, perm)
    validate(p)
    assert cohomology(p).ranks == cohomology(c).ranks
    with pytest.raises(InvalidInputError):
        permute_basis(c, 1, [0, 0, 1])


def test_representatives_are_cocycles():
    c = simplicial_cochains(SPHERE)
    reps = cohomology_representatives(c, 2)
    assert len(reps) == 1
    v = [reps[0].get(j, 0) for j in range(c.dim(2))]
    assert all(x == 0 for x in c.d(2).apply(v))


# -- chain maps ---------------------------------------------------------------

def test_identity_is_quasi_iso_and_cone_acyclic():
    c = simplicial_cochains(SPHERE)
    f = ChainMap.identity(c)
    assert quasi_iso_check(f).ok
    assert is_acyclic(mapping_cone(f))


def test_zero_map_not_quasi_iso():
    c = simplicial_cochains(CIRCLE)
    f = ChainMap.zero(c, c)
    rep = quasi_iso_check(f)
    assert not rep.ok and rep.failures == [0, 1]
    assert not is_acyclic(mapping_cone(f))
    assert induced_rank(f, 1) == 0


def test_non_chain_map_rejected():
    c = simplicial_cochains(CIRCLE)
    maps = {0: SparseIntMatrix.identity(3), 1: SparseIntMatrix.zero(3, 3)}
    with pytest.raises(ValidationError):
        ChainMap(c, c, maps)


def test_compose():
    big = simplicial_cochains(SIMPLEX)
    mid = simplicial_cochains(SPHERE, top=3)
    small = simplicial_cochains(CIRCLE, top=3)
    f = restriction_map(big, mid)
    g = restriction_map(mid, small)
    validate_chain_map(g.compose(f))
    assert g.compose(f).at(0) == multiply(g.at(0), f.at(0))


def test_ses_of_pair():
    # 0 -> C(K, L) -> C(K) -> C(L) -> 0 for L the boundary circle of a triangle
    k = simplicial_cochains([(0, 1, 2)])
    l = simplicial_cochains(CIRCLE, top=2)
    g = restriction_map(k, l)
    rel_basis = {t: tuple(s for s in k.basis[t] if s not in set(l.basis.get(t, ()))) for t in k.degrees()}
    rel_diff = {}
    for t in range(k.max_degree):
        rows = [k.index(t + 1)[s] for s in rel_basis[t + 1]]
        cols = [k.index(t)[s] for s in rel_basis[t]]
        rel_diff[t] = k.d(t).select(rows, cols)
    rel = CochainComplex(0, rel_basis, rel_diff, max_degree=k.max_degree)
    f = ChainMap(rel, k, {t: SparseIntMatrix(k.dim(t), rel.dim(t),
                                             {(k.index(t)[s], j): 1 for j, s in enumerate(rel_basis[t])})
                          for t in k.degrees()})
    verify_ses(f, g)
    assert cohomology(rel).nonzero() == {2: 1}
    with pytest.raises(ValidationError):
        verify_ses(f, ChainMap.zero(k, l))


@st.composite
def complex_pairs(draw):
    n = draw(st.integers(2, 5))
    facets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=3),
                           min_size=1, max_size=6))
    sub = draw(st.lists(st.sampled_from(facets), max_size=len(facets)))
    subfaces = [tuple(sorted(g)) for f in sub for k in range(1, len(f) + 1)
                for g in combinations(sorted(f), k)]
    keep = draw(st.lists(st.sampled_from(subfaces), max_size=4)) if subfaces else []
    return [tuple(sorted(f)) for f in facets], keep


@given(complex_pairs())
def test_quasi_iso_routes_agree(pair):
    facets, sub = pair
    big = simplicial_cochains(facets, top=2)
    small = simplicial_cochains(sub, top=2)
    f = restriction_map(big, small)
    assert quasi_iso_check(f).ok == is_acyclic(mapping_cone(f))


@given(st.lists(st.sets(st.integers(0, 5), min_size=1, max_size=4), min_size=1, max_size=6))
def test_euler_characteristic(facets):
    c = simplicial_cochains(facets)
    rep = cohomology(c)
    assert rep.euler == sum((-1) ** t * r for t, r in rep.ranks.items())
    assert rep.ranks.get(0, 0) >= 1
