import pytest
from hypothesis import given, strategies as st

from finkoszul.chaincx import cohomology
from finkoszul.cosimp import (
    PerpExpansion,
    blocks_to_chain,
    build_normalized,
    chain_to_blocks,
    coaction,
    coaugment,
    codegeneracy,
    coface,
    coface_from_comonad,
    comultiply,
    cosimplicial_basis,
    counit,
    normalized_basis,
    perp_chains,
    projection_to_kz,
    verify_norm_vs_kz,
)
from finkoszul.errors import BudgetExceededError, InvalidInputError
from finkoszul.exactla import SparseIntMatrix, multiply
from finkoszul.fikoszul import CONSTANT, UNIT, hom_module
from finkoszul.setcomb import full_mask, ordered_bell

MODULES = [UNIT, CONSTANT, hom_module(1), hom_module(2), hom_module(3)]
MODULE_IDS = ["unit", "constant", "hom1", "hom2", "hom3"]


def identity(n):
    return SparseIntMatrix.identity(n)


# -- comonad on chains --------------------------------------------------------

def test_chain_count():
    # chains of length k in the subsets of a b-set: (k+1)^b
    for b in range(4):
        for k in range(4):
            assert len(perp_chains(b, k)) == (k + 1) ** b


@pytest.mark.parametrize("g", MODULES[1:4], ids=MODULE_IDS[1:4])
@pytest.mark.parametrize("b", [2, 3])
def test_counit_comultiply_laws(g, b):
    for k in range(1, 3):
        n = len(PerpExpansion(g, b, k))
        for j in range(k):
            delta = comultiply(g, b, k, j)
            assert multiply(counit(g, b, k + 1, j), delta) == identity(n)
            assert multiply(counit(g, b, k + 1, j + 1), delta) == identity(n)


@pytest.mark.parametrize("g", MODULES[1:4], ids=MODULE_IDS[1:4])
def test_comultiply_coassociative(g):
    b = 3
    for k in range(1, 3):
        for j in range(k):
            lhs = multiply(comultiply(g, b, k + 1, j), comultiply(g, b, k, j))
            rhs = multiply(comultiply(g, b, k + 1, j + 1), comultiply(g, b, k, j))
            assert lhs == rhs


@pytest.mark.parametrize("g", MODULES[1:4], ids=MODULE_IDS[1:4])
def test_coaugmentation_split_by_counit(g):
    b = 3
    for k in range(0, 3):
        n = len(PerpExpansion(g, b, k))
        for j in range(k + 1):
            assert multiply(counit(g, b, k + 1, j), coaugment(g, b, k, j)) == identity(n)


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", [2, 3])
def test_comodule_laws(f, b):
    for k in range(0, 3):
        n = len(PerpExpansion(f, b, k))
        rho = coaction(f, b, k)
        assert multiply(counit(f, b, k + 1, k), rho) == identity(n)
        lhs = multiply(coaction(f, b, k + 1), rho)
        rhs = multiply(comultiply(f, b, k + 1, k), rho)
        assert lhs == rhs


def test_level_errors():
    with pytest.raises(InvalidInputError):
        counit(CONSTANT, 2, 1, 1)
    with pytest.raises(InvalidInputError):
        comultiply(CONSTANT, 2, 1, 3)
    with pytest.raises(InvalidInputError):
        coface(CONSTANT, 2, 1, 5)
    with pytest.raises(InvalidInputError):
        codegeneracy(CONSTANT, 2, 1, 2)


# -- block form ---------------------------------------------------------------

@given(st.integers(0, 5).flatmap(lambda b: st.tuples(st.just(b), st.integers(0, 4))), st.data())
def test_chain_block_roundtrip(bk, data):
    b, k = bk
    chain = data.draw(st.sampled_from(perp_chains(b, k)))
    carrier, blocks = chain_to_blocks(chain, b)
    assert len(blocks) == k
    acc = carrier
    for blk in blocks:
        assert not blk & acc
        acc |= blk
    assert acc == full_mask(b)
    if k:
        assert blocks_to_chain(carrier, blocks) == chain


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", [0, 1, 2, 3])
def test_cofaces_two_routes(f, b):
    for ell in range(3):
        for i in range(ell + 2):
            assert coface(f, b, ell, i) == coface_from_comonad(f, b, ell, i)


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", [1, 2, 3])
def test_cosimplicial_identities(f, b):
    for ell in range(3):
        for j in range(ell + 3):
            for i in range(j):
                assert (multiply(coface(f, b, ell + 1, j), coface(f, b, ell, i))
                        == multiply(coface(f, b, ell + 1, i), coface(f, b, ell, j - 1)))
        for j in range(ell + 1):
            for i in range(ell + 2):
                lhs = multiply(codegeneracy(f, b, ell, j), coface(f, b, ell, i))
                if i < j:
                    rhs = multiply(coface(f, b, ell - 1, i), codegeneracy(f, b, ell - 1, j - 1))
                elif i in (j, j + 1):
                    rhs = identity(lhs.rows)
                else:
                    rhs = multiply(coface(f, b, ell - 1, i - 1), codegeneracy(f, b, ell - 1, j))
                assert lhs == rhs
        for j in range(ell):
            for i in range(j + 1):
                assert (multiply(codegeneracy(f, b, ell - 1, i), codegeneracy(f, b, ell, j + 1))
                        == multiply(codegeneracy(f, b, ell - 1, j), codegeneracy(f, b, ell, i)))


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_normalized_is_joint_kernel_of_codegeneracies(f, b):
    for t in range(1, 4):
        basis = cosimplicial_basis(f, b, t)
        stacked = [codegeneracy(f, b, t - 1, j) for j in range(t)]
        # a basis vector lies in every kernel iff no codegeneracy column is nonzero
        hit = set()
        for m in stacked:
            hit.update(m.columns())
        kernel_part = tuple(e for k, e in enumerate(basis) if k not in hit)
        assert kernel_part == normalized_basis(f, b, t)


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_normalized_differential_is_restricted_coface_sum(f, b):
    n = build_normalized(f, b)
    for t in range(min(b, 3)):
        total = None
        for i in range(t + 2):
            m = coface(f, b, t, i).scale((-1) ** i)
            total = m if total is None else total + m
        src = {e: k for k, e in enumerate(cosimplicial_basis(f, b, t))}
        tgt = cosimplicial_basis(f, b, t + 1)
        sub = total.select(None, [src[e] for e in n.basis[t]])
        degenerate = [k for k, e in enumerate(tgt) if not all(e.blocks)]
        keep = [k for k, e in enumerate(tgt) if all(e.blocks)]
        assert sub.select(degenerate, None).is_zero()
        assert sub.select(keep, None) == n.d(t)


# -- normalized complex versus Koszul complex ---------------------------------

def test_normalized_dims():
    assert list(build_normalized(hom_module(1), 2).dims().values()) == [1, 2, 0]
    assert list(build_normalized(UNIT, 3).dims().values()) == [0, 1, 6, 6]
    # total size for the constant module: ordered partitions of subsets
    n = build_normalized(CONSTANT, 3)
    assert sum(n.dims().values()) == sum(ordered_bell(k) * c for k, c in [(0, 1), (1, 3), (2, 3), (3, 1)])


@pytest.mark.parametrize("f", MODULES, ids=MODULE_IDS)
@pytest.mark.parametrize("b", range(0, 6))
def test_projection_is_surjective_quasi_iso(f, b):
    rep = verify_norm_vs_kz(f, b)
    assert rep["surjective"] and rep["quasi_isomorphism"]
    assert rep["fi_op_cohomology"] == cohomology(build_normalized(f, b)).nonzero()


def test_projection_validates_as_chain_map():
    # ChainMap construction checks commutation with the differentials
    p = projection_to_kz(hom_module(2), 4)
    assert p.source.dims() != p.target.dims()


def test_normalized_budget():
    with pytest.raises(BudgetExceededError):
        build_normalized(CONSTANT, 7)
    with pytest.raises(InvalidInputError):
        build_normalized(CONSTANT, -1)
