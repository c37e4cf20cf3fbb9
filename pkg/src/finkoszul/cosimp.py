"""The subset comonad on Sigma^op-modules and the normalized cosimplicial complex.

Applying the comonad ``k`` times to ``G`` and evaluating at ``b`` gives a
direct sum over chains ``b >= c_1 >= ... >= c_k`` of ``G(c_k)``.  Its
structure maps act on chains: the counit at level ``j`` deletes ``c_{j+1}``
when it equals ``c_j``, comultiplication inserts every intermediate subset,
the coaugmentation duplicates ``c_j``, and an FI^op-module coacts by
appending a subset of the innermost set and restricting the label.

Block form.  A chain of length ``l`` is the same as a carrier ``C = c_l``
plus blocks ``b_0 = c_{l-1} \\ c_l, ..., b_{l-1} = b \\ c_1``, so ``b_0`` is
the block adjacent to the carrier.  In this indexing the cofaces of the
opposite cosimplicial object are:

* ``d^0`` carves a subset ``B`` of the carrier off as a new block ``b_0``
  and restricts the label to ``C \\ B``;
* ``d^i`` (``1 <= i <= l``) splits ``b_{i-1} = P + Q`` into consecutive
  blocks ``P`` (position ``i-1``) and ``Q`` (position ``i``);
* ``d^{l+1}`` appends an empty block at the end;

and the codegeneracy ``s^j`` deletes ``b_j`` if it is empty and is zero
otherwise.  The normalized complex keeps the basis elements whose blocks
are all nonempty, with differential ``sum_i (-1)^i d^i``.
"""

from __future__ import annotations

from itertools import product
from typing import NamedTuple

from .chaincx import ChainMap, CochainComplex, cohomology, quasi_iso_check
from .errors import BudgetExceededError, InvalidInputError
from .exactla import SparseIntMatrix, rank_exact
from .fikoszul import FIopModule, KoszulBasisElt, build_kz, relative_mask
from .setcomb import (
    full_mask,
    mask_elements,
    ordered_partition_blocks,
    submasks,
    wedge_word_sign,
)

DEFAULT_MAX_B = 6


def _check_budget(b: int, max_b: int | None):
    cap = DEFAULT_MAX_B if max_b is None else max_b
    if b > cap:
        raise BudgetExceededError(f"b = {b} exceeds the normalized-complex budget {cap}")


def _restrict(f: FIopModule, outer: int, inner: int, k: int) -> dict[int, int]:
    """Column ``k`` of the restriction F(outer) -> F(inner)."""
    if outer == inner:
        return {k: 1}
    return f.restriction_columns(outer.bit_count(), relative_mask(outer, inner)).get(k, {})


# -- the comonad on chains ----------------------------------------------------

class ChainElt(NamedTuple):
    chain: tuple[int, ...]
    label: object


def perp_chains(b: int, k: int) -> list[tuple[int, ...]]:
    """Chains b >= c_1 >= ... >= c_k, each link in decreasing bitmask order."""
    out = [()]
    for _ in range(k):
        nxt = []
        for ch in out:
            outer = ch[-1] if ch else full_mask(b)
            for s in submasks(outer):
                nxt.append(ch + (s,))
        out = nxt
    return out


class PerpExpansion:
    """k-fold comonad applied to ``g`` at ``b``, as a sum over chains."""

    def __init__(self, g: FIopModule, b: int, k: int):
        self.g, self.b, self.k = g, b, k
        basis = []
        for ch in perp_chains(b, k):
            inner = ch[-1] if ch else full_mask(b)
            for lab in g.labels(inner.bit_count()):
                basis.append(ChainElt(ch, lab))
        self.basis = tuple(basis)
        self.index = {e: i for i, e in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    def summands(self) -> int:
        return len(perp_chains(self.b, self.k))


def _matrix(src: PerpExpansion, tgt: PerpExpansion, images) -> SparseIntMatrix:
    entries = {}
    for col, e in enumerate(src.basis):
        for img, coef in images(e):
            key = (tgt.index[img], col)
            entries[key] = entries.get(key, 0) + coef
    return SparseIntMatrix(len(tgt), len(src), entries)


def counit(g: FIopModule, b: int, k: int, j: int) -> SparseIntMatrix:
    """Counit at level j: k-fold -> (k-1)-fold, deleting c_{j+1} when it equals c_j."""
    if not 0 <= j < k:
        raise InvalidInputError("level out of range")
    src, tgt = PerpExpansion(g, b, k), PerpExpansion(g, b, k - 1)
    full = full_mask(b)

    def images(e):
        amb = e.chain[j - 1] if j else full
        if e.chain[j] != amb:
            return []
        return [(ChainElt(e.chain[:j] + e.chain[j + 1:], e.label), 1)]

    return _matrix(src, tgt, images)


def comultiply(g: FIopModule, b: int, k: int, j: int) -> SparseIntMatrix:
    """Comultiplication at level j: insert every s with c_{j+1} <= s <= c_j."""
    if not 0 <= j < k:
        raise InvalidInputError("level out of range")
    src, tgt = PerpExpansion(g, b, k), PerpExpansion(g, b, k + 1)
    full = full_mask(b)

    def images(e):
        amb = e.chain[j - 1] if j else full
        inner = e.chain[j]
        free = amb & ~inner
        return [(ChainElt(e.chain[:j] + (inner | s,) + e.chain[j:], e.label), 1)
                for s in submasks(free)]

    return _matrix(src, tgt, images)


def coaugment(g: FIopModule, b: int, k: int, j: int) -> SparseIntMatrix:
    """Coaugmentation at level j: duplicate the ambient set c_j."""
    if not 0 <= j <= k:
        raise InvalidInputError("level out of range")
    src, tgt = PerpExpansion(g, b, k), PerpExpansion(g, b, k + 1)
    full = full_mask(b)

    def images(e):
        amb = e.chain[j - 1] if j else full
        return [(ChainElt(e.chain[:j] + (amb,) + e.chain[j:], e.label), 1)]

    return _matrix(src, tgt, images)


def coaction(f: FIopModule, b: int, k: int) -> SparseIntMatrix:
    """Comodule structure on the innermost factor: append s <= c_k, restrict the label."""
    src, tgt = PerpExpansion(f, b, k), PerpExpansion(f, b, k + 1)
    full = full_mask(b)

    def images(e):
        inner = e.chain[-1] if e.chain else full
        idx = f.labels(inner.bit_count()).index(e.label)
        out = []
        for s in submasks(inner):
            labels = f.labels(s.bit_count())
            for r, v in _restrict(f, inner, s, idx).items():
                out.append((ChainElt(e.chain + (s,), labels[r]), v))
        return out

    return _matrix(src, tgt, images)


# -- block form ---------------------------------------------------------------

class DecompositionBasisElt(NamedTuple):
    """Label of F(carrier) with an ordered list of blocks covering the rest."""

    carrier: int
    blocks: tuple[int, ...]
    label: object


def chain_to_blocks(chain: tuple[int, ...], b: int) -> tuple[int, tuple[int, ...]]:
    full = full_mask(b)
    sets = (full,) + tuple(chain)
    carrier = sets[-1]
    blocks = tuple(sets[i - 1] & ~sets[i] for i in range(len(sets) - 1, 0, -1))
    return carrier, blocks


def blocks_to_chain(carrier: int, blocks: tuple[int, ...]) -> tuple[int, ...]:
    chain = [carrier]
    acc = carrier
    for blk in blocks[:-1]:
        acc |= blk
        chain.append(acc)
    return tuple(reversed(chain)) if blocks else ()


def _assignments(bits: int, ell: int, nonempty: bool):
    """Ordered lists of ell blocks covering bits; empty blocks allowed unless ``nonempty``."""
    if nonempty:
        if ell == 0:
            return [()] if bits == 0 else []
        return ordered_partition_blocks(bits, ell)
    elems = mask_elements(bits)
    if ell == 0:
        return [()] if not elems else []
    out = []
    for v in product(range(ell), repeat=len(elems)):
        blocks = [0] * ell
        for e, i in zip(elems, v):
            blocks[i] |= 1 << (e - 1)
        out.append(tuple(blocks))
    return out


def cosimplicial_basis(f: FIopModule, b: int, ell: int, nonempty: bool = False) -> tuple:
    full = full_mask(b)
    out = []
    for carrier in submasks(full):
        labels = f.labels(carrier.bit_count())
        if not labels:
            continue
        for blocks in _assignments(full & ~carrier, ell, nonempty):
            for lab in labels:
                out.append(DecompositionBasisElt(carrier, blocks, lab))
    return tuple(out)


def _coface_images(f: FIopModule, e: DecompositionBasisElt, i: int, nonempty: bool):
    """Images of one basis element under the coface d^i, as (element, coefficient)."""
    ell = len(e.blocks)
    if i == 0:
        idx = f.labels(e.carrier.bit_count()).index(e.label)
        out = []
        for rest in submasks(e.carrier):
            carved = e.carrier & ~rest
            if nonempty and not carved:
                continue
            labels = f.labels(rest.bit_count())
            for r, v in _restrict(f, e.carrier, rest, idx).items():
                out.append((DecompositionBasisElt(rest, (carved,) + e.blocks, labels[r]), v))
        return out
    if i <= ell:
        blk = e.blocks[i - 1]
        out = []
        for p in submasks(blk):
            q = blk & ~p
            if nonempty and not (p and q):
                continue
            new = e.blocks[:i - 1] + (p, q) + e.blocks[i:]
            out.append((DecompositionBasisElt(e.carrier, new, e.label), 1))
        return out
    if i == ell + 1:
        return [] if nonempty else [(DecompositionBasisElt(e.carrier, e.blocks + (0,), e.label), 1)]
    raise InvalidInputError("coface index out of range")


def coface(f: FIopModule, b: int, ell: int, i: int) -> SparseIntMatrix:
    src = cosimplicial_basis(f, b, ell)
    tgt = {e: k for k, e in enumerate(cosimplicial_basis(f, b, ell + 1))}
    entries = {}
    for col, e in enumerate(src):
        for img, v in _coface_images(f, e, i, False):
            key = (tgt[img], col)
            entries[key] = entries.get(key, 0) + v
    return SparseIntMatrix(len(tgt), len(src), entries)


def codegeneracy(f: FIopModule, b: int, ell: int, j: int) -> SparseIntMatrix:
    """s^j from ell+1 blocks to ell blocks."""
    if not 0 <= j <= ell:
        raise InvalidInputError("codegeneracy index out of range")
    src = cosimplicial_basis(f, b, ell + 1)
    tgt = {e: k for k, e in enumerate(cosimplicial_basis(f, b, ell))}
    entries = {}
    for col, e in enumerate(src):
        if e.blocks[j] == 0:
            img = DecompositionBasisElt(e.carrier, e.blocks[:j] + e.blocks[j + 1:], e.label)
            entries[(tgt[img], col)] = 1
    return SparseIntMatrix(len(tgt), len(src), entries)


def coface_from_comonad(f: FIopModule, b: int, ell: int, i: int) -> SparseIntMatrix:
    """The coface d^i assembled from comonad structure maps on chains.

    d^0 is the coaction, d^i for 1 <= i <= ell is comultiplication at level
    ell - i, and d^{ell+1} is the coaugmentation at level 0.  The result is
    expressed in the block-form bases for comparison with ``coface``.
    """
    if i == 0:
        m = coaction(f, b, ell)
    elif i <= ell:
        m = comultiply(f, b, ell, ell - i)
    elif i == ell + 1:
        m = coaugment(f, b, ell, 0)
    else:
        raise InvalidInputError("coface index out of range")
    src = PerpExpansion(f, b, ell)
    tgt = PerpExpansion(f, b, ell + 1)
    src_pos = _chain_positions(src, cosimplicial_basis(f, b, ell), b)
    tgt_pos = _chain_positions(tgt, cosimplicial_basis(f, b, ell + 1), b)
    entries = {(tgt_pos[r], src_pos[c]): v for (r, c), v in m.entries()}
    return SparseIntMatrix(len(tgt), len(src), entries)


def _chain_positions(pe: PerpExpansion, block_basis, b: int) -> list[int]:
    """Position in ``block_basis`` of each chain-basis element of ``pe``."""
    idx = {e: k for k, e in enumerate(block_basis)}
    out = []
    for e in pe.basis:
        carrier, blocks = chain_to_blocks(e.chain, b)
        out.append(idx[DecompositionBasisElt(carrier, blocks, e.label)])
    return out


# -- normalized complex -------------------------------------------------------

def normalized_basis(f: FIopModule, b: int, t: int) -> tuple:
    return cosimplicial_basis(f, b, t, nonempty=True)


def build_normalized(f: FIopModule, b: int, max_b: int | None = None,
                     check: bool = True) -> CochainComplex:
    """N(F)(b) on the window [0, b] with differential sum_{i=0}^t (-1)^i d^i."""
    if b < 0:
        raise InvalidInputError("b must be non-negative")
    _check_budget(b, max_b)
    basis = {t: normalized_basis(f, b, t) for t in range(b + 1)}
    diff = {}
    for t in range(b):
        tgt = {e: k for k, e in enumerate(basis[t + 1])}
        entries = {}
        for col, e in enumerate(basis[t]):
            for i in range(t + 1):
                sign = -1 if i & 1 else 1
                for img, v in _coface_images(f, e, i, True):
                    key = (tgt[img], col)
                    entries[key] = entries.get(key, 0) + sign * v
        diff[t] = SparseIntMatrix(len(tgt), len(basis[t]), entries)
    return CochainComplex(0, basis, diff, max_degree=b, check=check)


def projection_to_kz(f: FIopModule, b: int, source: CochainComplex | None = None,
                     target: CochainComplex | None = None) -> ChainMap:
    """N(F)(b) -> Kz F(b): zero unless every block is a singleton.

    An element with singleton blocks {x_0}, ..., {x_{t-1}} goes to its label
    tensored with x_0 ^ ... ^ x_{t-1}, rewritten in the increasing
    orientation generator of the complement.
    """
    src = source if source is not None else build_normalized(f, b)
    tgt = target if target is not None else build_kz(f, b, max_b=b)
    maps = {}
    for t in src.degrees():
        idx = tgt.index(t)
        entries = {}
        for col, e in enumerate(src.basis[t]):
            if all(blk.bit_count() == 1 for blk in e.blocks):
                word = [blk.bit_length() for blk in e.blocks]
                entries[(idx[KoszulBasisElt(e.carrier, e.label)], col)] = wedge_word_sign(word)
        maps[t] = SparseIntMatrix(tgt.dim(t), src.dim(t), entries)
    return ChainMap(src, tgt, maps)


def verify_norm_vs_kz(f: FIopModule, b: int, max_b: int | None = None) -> dict:
    """Check the projection is a surjective quasi-isomorphism; report FI^op-cohomology."""
    src = build_normalized(f, b, max_b=max_b)
    tgt = build_kz(f, b, max_b=b)
    proj = projection_to_kz(f, b, src, tgt)
    surjective = all(rank_exact(proj.at(t)) == tgt.dim(t) for t in tgt.degrees())
    qi = quasi_iso_check(proj, validate_map=False)
    ranks = cohomology(tgt).ranks
    return {
        "module": f.name,
        "b": b,
        "chain_map": True,
        "surjective": surjective,
        "quasi_isomorphism": qi.ok,
        "failed_degrees": qi.failures,
        "normalized_dims": src.dims(),
        "koszul_dims": tgt.dims(),
        "fi_op_cohomology": {n: r for n, r in ranks.items() if r},
    }
