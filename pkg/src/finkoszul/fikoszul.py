"""FI^op-modules, their Koszul complexes, and the complexes C(b, a).

An FI^op-module F assigns a free module with a labelled basis to every
finite set ``{1..n}`` and a restriction map ``F(n) -> F(s)`` to every
subset ``s``, re-indexed to ``{1..|s|}``.  The Koszul complex at ``b`` has
in degree ``t`` one summand ``F(S) (x) Or(b \\ S)`` per subset ``S`` of size
``b - t``; its differential restricts to ``S \\ {x}`` and wedges ``x`` onto
the orientation of the complement.

Basis order in degree ``t``: subsets in decreasing bitmask order, then the
labels of ``F(S)`` in the module's own order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .chaincx import ChainMap, CochainComplex, validate_chain_map
from .errors import BudgetExceededError, InvalidInputError
from .exactla import SparseIntMatrix, block_diag, hstack, multiply, vstack
from .setcomb import (
    full_mask,
    mask_elements,
    permutation_sign,
    restrict_values,
    subsets_of_size,
    surjection_table,
    wedge_sign,
)

DEFAULT_MAX_B_SMALL_A = 8
DEFAULT_MAX_B = 7


def default_budget(a: int) -> int:
    """Largest b built by default for target size a."""
    return DEFAULT_MAX_B_SMALL_A if a <= 1 else DEFAULT_MAX_B


def _check_budget(b: int, max_b: int | None, a: int | None = None):
    cap = max_b if max_b is not None else default_budget(a if a is not None else 0)
    if b > cap:
        raise BudgetExceededError(f"b = {b} exceeds the size budget {cap}")


def remove_position(n: int, x: int) -> int:
    """Bitmask of {1..n} minus {x}."""
    return full_mask(n) & ~(1 << (x - 1))


def relative_mask(outer: int, inner: int) -> int:
    """``inner`` (a submask of ``outer``) re-indexed to {1..|outer|}."""
    out = 0
    for k, e in enumerate(mask_elements(outer)):
        if inner >> (e - 1) & 1:
            out |= 1 << k
    return out


# -- FI^op-modules ----------------------------------------------------------

class FIopModule:
    """Base class: subclasses provide ``labels`` and either restriction hook.

    ``codim1_restriction(n, x)`` is the matrix of ``F(n) -> F(n - 1)``
    forgetting the element ``x``; ``restriction(n, bits)`` composes these,
    removing elements from the largest down so positions stay valid.
    """

    name = "F"

    def labels(self, n: int) -> tuple:
        raise NotImplementedError

    def dimension(self, n: int) -> int:
        return len(self.labels(n))

    def codim1_restriction(self, n: int, x: int) -> SparseIntMatrix:
        return self.restriction(n, remove_position(n, x))

    def restriction(self, n: int, bits: int) -> SparseIntMatrix:
        return self.composed_restriction(n, bits)

    def composed_restriction(self, n: int, bits: int) -> SparseIntMatrix:
        m = SparseIntMatrix.identity(self.dimension(n))
        size = n
        for x in reversed(mask_elements(full_mask(n) & ~bits)):
            m = multiply(self.codim1_restriction(size, x), m)
            size -= 1
        return m

    def restriction_columns(self, n: int, bits: int) -> dict[int, dict[int, int]]:
        """Columns of ``restriction(n, bits)`` keyed by source index."""
        key = (n, bits)
        cache = self.__dict__.setdefault("_col_cache", {})
        if key not in cache:
            cache[key] = self.restriction(n, bits).columns()
        return cache[key]

    def __repr__(self) -> str:
        return self.name


class HomOmegaModule(FIopModule):
    """k Hom_Omega(-, a): surjections onto {1..a}, restricted when still onto."""

    def __init__(self, a: int):
        if a < 0:
            raise InvalidInputError("a must be non-negative")
        self.a = a
        self.name = f"kHom(-,{a})"

    def labels(self, n: int) -> tuple:
        return surjection_table(n, self.a)[0]

    def restriction(self, n: int, bits: int) -> SparseIntMatrix:
        src = self.labels(n)
        m = bits.bit_count()
        _, tidx = surjection_table(m, self.a)
        entries = {}
        for k, f in enumerate(src):
            g = restrict_values(f, bits, self.a)
            if g is not None:
                entries[(tidx[g], k)] = 1
        return SparseIntMatrix(len(tidx), len(src), entries)


class ConstantModule(FIopModule):
    """The constant module k: one basis element everywhere, identity maps."""

    name = "k"

    def labels(self, n: int) -> tuple:
        return ("*",)

    def restriction(self, n: int, bits: int) -> SparseIntMatrix:
        return SparseIntMatrix.identity(1)


class UnitModule(FIopModule):
    """The module that is k on the empty set and zero on nonempty sets."""

    name = "1"

    def labels(self, n: int) -> tuple:
        return ("*",) if n == 0 else ()

    def restriction(self, n: int, bits: int) -> SparseIntMatrix:
        return SparseIntMatrix.identity(1) if n == 0 else SparseIntMatrix.zero(
            self.dimension(bits.bit_count()), 0)


@lru_cache(maxsize=None)
def hom_module(a: int) -> HomOmegaModule:
    return HomOmegaModule(a)


CONSTANT = ConstantModule()
UNIT = UnitModule()


# -- Koszul complexes -------------------------------------------------------

class KoszulBasisElt(NamedTuple):
    """Basis element F-label on ``support`` tensored with omega(complement)."""

    support: int
    label: object


def kz_basis(f: FIopModule, b: int, t: int) -> tuple:
    out = []
    for s in subsets_of_size(b, b - t):
        for lab in f.labels(s.bit_count()):
            out.append(KoszulBasisElt(s, lab))
    return tuple(out)


def _kz_differential(f: FIopModule, b: int, t: int, src_basis, tgt_index) -> SparseIntMatrix:
    full = full_mask(b)
    entries = {}
    col = 0
    for s in subsets_of_size(b, b - t):
        n = s.bit_count()
        comp = full & ~s
        elems = mask_elements(s)
        pieces = []
        for pos, x in enumerate(elems, start=1):
            sign = wedge_sign(x, comp)
            sub = s & ~(1 << (x - 1))
            cols = f.restriction_columns(n, remove_position(n, pos))
            tgt_labels = f.labels(n - 1)
            pieces.append((sign, sub, cols, tgt_labels))
        for k in range(f.dimension(n)):
            for sign, sub, cols, tgt_labels in pieces:
                for r, v in cols.get(k, {}).items():
                    row = tgt_index[KoszulBasisElt(sub, tgt_labels[r])]
                    entries[(row, col)] = entries.get((row, col), 0) + sign * v
            col += 1
    return SparseIntMatrix(len(tgt_index), len(src_basis), entries)


def build_kz(f: FIopModule, b: int, max_b: int | None = None, check: bool = True) -> CochainComplex:
    """Koszul complex Kz F(b) on the full window [0, b]."""
    if b < 0:
        raise InvalidInputError("b must be non-negative")
    _check_budget(b, max_b, getattr(f, "a", 0))
    basis = {t: kz_basis(f, b, t) for t in range(b + 1)}
    index = {t: {lab: i for i, lab in enumerate(basis[t])} for t in basis}
    diff = {t: _kz_differential(f, b, t, basis[t], index[t + 1]) for t in range(b)}
    return CochainComplex(0, basis, diff, max_degree=b, check=check)


def build_C(b: int, a: int, max_b: int | None = None, check: bool = True) -> CochainComplex:
    """C(b, a) = Kz kHom(-, a)(b), trimmed to its nonzero degrees (empty if b < a)."""
    if b < 0 or a < 0:
        raise InvalidInputError("sizes must be non-negative")
    if b < a:
        return CochainComplex.empty()
    _check_budget(b, max_b, a)
    return build_kz(hom_module(a), b, max_b=b, check=check).trimmed()


def restriction_map(b: int, a: int) -> SparseIntMatrix:
    """R_{b,a}: kHom(b, a) -> sum over (b-1)-subsets of kHom(b', a).

    Rows are blocked by subset (decreasing bitmask order), then by
    surjection order; this is the degree-0 differential of C(b, a).
    """
    if b < 0 or a < 0:
        raise InvalidInputError("sizes must be non-negative")
    src, _ = surjection_table(b, a)
    if b == 0:
        return SparseIntMatrix.zero(0, len(src))
    tgt, tidx = surjection_table(b - 1, a)
    entries = {}
    for blk, s in enumerate(subsets_of_size(b, b - 1)):
        for k, fv in enumerate(src):
            g = restrict_values(fv, s, a)
            if g is not None:
                entries[(blk * len(tgt) + tidx[g], k)] = 1
    return SparseIntMatrix(b * len(tgt), len(src), entries)


# -- subcomplexes with the distinguished element x = b ----------------------

SUBCOMPLEX_KINDS = ("D", "C_y", "Ctilde_y", "filt_y")


def _member(kind: str, b: int, y: int | None):
    top = 1 << (b - 1)

    def in_d(e):
        return not e.support & top

    if kind == "D":
        return in_d
    if kind == "C_y":
        # x in S and the fibre over y is exactly {x}
        return lambda e: bool(e.support & top) and e.label[-1] == y and e.label.count(y) == 1
    if kind == "Ctilde_y":
        return lambda e: in_d(e) or e.label[-1] == y
    if kind == "filt_y":
        return lambda e: in_d(e) or e.label[-1] <= y
    raise InvalidInputError(f"unknown subcomplex kind {kind!r}")


def sub_complex(c: CochainComplex, keep) -> tuple[CochainComplex, ChainMap]:
    """Subcomplex on the basis elements satisfying ``keep``, with its inclusion.

    Raises ValidationError (via the chain-map check) if the span is not
    closed under the differential.
    """
    basis = {t: tuple(e for e in c.basis[t] if keep(e)) for t in c.degrees()}
    pos = {t: [i for i, e in enumerate(c.basis[t]) if keep(e)] for t in c.degrees()}
    diff = {t: c.d(t).select(pos[t + 1], pos[t]) for t in range(c.min_degree, c.max_degree)}
    sub = CochainComplex(c.min_degree, basis, diff, max_degree=c.max_degree, check=False)
    incl = {t: SparseIntMatrix(c.dim(t), len(pos[t]), {(i, k): 1 for k, i in enumerate(pos[t])})
            for t in c.degrees()}
    return sub, ChainMap(sub, c, incl)


def build_subcomplex(b: int, a: int, kind: str, y: int | None = None,
                     parent: CochainComplex | None = None) -> tuple[CochainComplex, ChainMap]:
    """One of D, C_y, Ctilde_y, filt_y inside C(b, a), with its validated inclusion."""
    if not b > a > 0:
        raise InvalidInputError("subcomplexes need b > a > 0")
    if kind not in SUBCOMPLEX_KINDS:
        raise InvalidInputError(f"unknown subcomplex kind {kind!r}")
    if kind != "D" and (y is None or not 1 <= y <= a):
        raise InvalidInputError(f"kind {kind} needs y in 1..{a}")
    parent = parent if parent is not None else build_C(b, a)
    return sub_complex(parent, _member(kind, b, y))


def d_to_shifted_label(e: KoszulBasisElt) -> KoszulBasisElt:
    """Basis bijection D -> C(b-1, a)[1]: the support does not contain b."""
    return e


def c_y_to_smaller_label(y: int):
    """Basis bijection C_y -> C(b-1, a-1): drop x = b and close the gap at y."""

    def fn(e: KoszulBasisElt) -> KoszulBasisElt:
        top = e.support.bit_length()
        vals = tuple(v if v < y else v - 1 for v in e.label[:-1])
        return KoszulBasisElt(e.support & ~(1 << (top - 1)), vals)

    return fn


def matrix_isomorphism(c1: CochainComplex, c2: CochainComplex, label_map) -> bool:
    """True iff ``label_map`` sends each basis of c1 onto that of c2 in the same
    positions and the differentials coincide entry for entry."""
    for t in set(c1.degrees()) | set(c2.degrees()):
        b1 = tuple(label_map(e) for e in c1.basis.get(t, ()))
        if b1 != tuple(c2.basis.get(t, ())):
            return False
    for t in set(c1.degrees()) | set(c2.degrees()):
        if c1.d(t) != c2.d(t):
            return False
    return True


def ses_maps(b: int, a: int, y: int, parent: CochainComplex | None = None):
    """The sequence 0 -> D -> filt_y (+) Ctilde_{y+1} -> filt_{y+1} -> 0.

    First map is (incl, -incl), second is the sum of the inclusions.
    """
    if not 1 <= y < a:
        raise InvalidInputError(f"y must lie in 1..{a - 1}")
    parent = parent if parent is not None else build_C(b, a)
    d_cx, _ = build_subcomplex(b, a, "D", parent=parent)
    f_y, _ = build_subcomplex(b, a, "filt_y", y, parent)
    ct, _ = build_subcomplex(b, a, "Ctilde_y", y + 1, parent)
    f_next, _ = build_subcomplex(b, a, "filt_y", y + 1, parent)
    def embed(sub, sup, t, sign=1):
        idx = sup.index(t)
        return SparseIntMatrix(sup.dim(t), sub.dim(t),
                               {(idx[e], k): sign for k, e in enumerate(sub.basis[t])})

    mid_basis = {t: tuple(("f", e) for e in f_y.basis[t]) + tuple(("c", e) for e in ct.basis[t])
                 for t in parent.degrees()}
    mid_diff = {t: block_diag([f_y.d(t), ct.d(t)]) for t in range(parent.min_degree, parent.max_degree)}
    mid = CochainComplex(parent.min_degree, mid_basis, mid_diff, max_degree=parent.max_degree)
    first = {t: vstack([embed(d_cx, f_y, t), embed(d_cx, ct, t, -1)], cols=d_cx.dim(t))
             for t in parent.degrees()}
    second = {t: hstack([embed(f_y, f_next, t), embed(ct, f_next, t)], rows=f_next.dim(t))
              for t in parent.degrees()}
    return ChainMap(d_cx, mid, first), ChainMap(mid, f_next, second)


# -- constant module null-homotopy ----------------------------------------

def null_homotopy_constant(b: int) -> dict[int, SparseIntMatrix]:
    """Matrices h_t : Kz k(b)^t -> Kz k(b)^{t-1} with dh + hd = id.

    In support terms h adds the element 1 to the support when 1 lies in
    the complement (orientation omega(C) -> omega(C \\ {1})), else 0.
    """
    if b < 1:
        raise InvalidInputError("b must be at least 1")
    out = {}
    for t in range(1, b + 1):
        src = subsets_of_size(b, b - t)
        tgt = {s: i for i, s in enumerate(subsets_of_size(b, b - t + 1))}
        entries = {}
        for k, s in enumerate(src):
            if not s & 1:
                entries[(tgt[s | 1], k)] = 1
        out[t] = SparseIntMatrix(len(tgt), len(src), entries)
    return out


def check_null_homotopy(c: CochainComplex, h: dict[int, SparseIntMatrix]) -> dict[int, bool]:
    """Per degree: whether d_{t-1} h_t + h_{t+1} d_t is the identity."""
    out = {}
    for t in c.degrees():
        n = c.dim(t)
        acc = SparseIntMatrix.zero(n, n)
        if t in h and t - 1 in c.basis:
            acc = acc + multiply(c.d(t - 1), h[t])
        if t + 1 in h:
            acc = acc + multiply(h[t + 1], c.d(t))
        out[t] = acc == SparseIntMatrix.identity(n)
    return out


# -- top degree projection --------------------------------------------------

def top_degree_complex(b: int, a: int) -> CochainComplex:
    """One-dimensional complex concentrated in degree b - a."""
    return CochainComplex(b - a, {b - a: ("generator",)})


def top_degree_sign(support: int, values: tuple[int, ...], b: int) -> int:
    """Sign of the word (f^-1(1), ..., f^-1(a), complement increasing)."""
    elems = mask_elements(support)
    inv = [0] * len(values)
    for e, v in zip(elems, values):
        inv[v - 1] = e
    comp = mask_elements(full_mask(b) & ~support)
    return permutation_sign(inv + list(comp))


def top_degree_projection(b: int, a: int, source: CochainComplex | None = None) -> ChainMap:
    """Chain map C(b, a) -> one-dimensional complex in degree b - a."""
    if not b > a > 0:
        raise InvalidInputError("needs b > a > 0")
    src = source if source is not None else build_C(b, a)
    tgt = top_degree_complex(b, a)
    t = b - a
    row = {(0, k): top_degree_sign(e.support, e.label, b) for k, e in enumerate(src.basis[t])}
    f = ChainMap(src, tgt, {t: SparseIntMatrix(1, src.dim(t), row)}, check=False)
    validate_chain_map(f)
    return f


# -- symmetric group action -------------------------------------------------

def act_on_basis(e: KoszulBasisElt, sigma, pi, b: int) -> tuple[int, KoszulBasisElt]:
    """Image of a basis element of C(b, a) under (sigma, pi) in S_a x S_b.

    ``sigma`` and ``pi`` are tuples of images of 1..a and 1..b.  The support
    moves to pi(S), the surjection becomes sigma o f o pi^-1, and the
    orientation of the complement picks up the sign of sorting pi(C).
    """
    elems = mask_elements(e.support)
    new_pairs = sorted((pi[s - 1], sigma[v - 1]) for s, v in zip(elems, e.label))
    support = 0
    for s, _ in new_pairs:
        support |= 1 << (s - 1)
    comp = mask_elements(full_mask(b) & ~e.support)
    sign = permutation_sign([pi[c - 1] for c in comp])
    return sign, KoszulBasisElt(support, tuple(v for _, v in new_pairs))


def action_matrix(c: CochainComplex, t: int, sigma, pi, b: int) -> SparseIntMatrix:
    idx = c.index(t)
    entries = {}
    for k, e in enumerate(c.basis.get(t, ())):
        sign, img = act_on_basis(e, sigma, pi, b)
        entries[(idx[img], k)] = sign
    n = c.dim(t)
    return SparseIntMatrix(n, n, entries)


def is_equivariant(c: CochainComplex, sigma, pi, b: int) -> bool:
    for t in range(c.min_degree, c.max_degree):
        lhs = multiply(action_matrix(c, t + 1, sigma, pi, b), c.d(t))
        rhs = multiply(c.d(t), action_matrix(c, t, sigma, pi, b))
        if lhs != rhs:
            return False
    return True
