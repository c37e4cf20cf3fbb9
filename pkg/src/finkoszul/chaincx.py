"""Finite cochain complexes of free integer modules.

A complex lives on a window ``[min_degree, max_degree]``; outside it every
term is zero.  ``diff[t]`` is the matrix of ``d_t : C^t -> C^{t+1}`` with
shape ``(dim C^{t+1}, dim C^t)``, so composition is ordinary matrix
multiplication ``diff[t+1] @ diff[t]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError, ValidationError
from .exactla import (
    IncrementalEchelon,
    SparseIntMatrix,
    columns_matrix,
    hstack,
    kernel_basis_sparse,
    multiply,
    rank_exact,
    smith_normal_form,
    vstack,
)


class CochainComplex:
    """Per-degree bases plus integer differentials."""

    def __init__(self, min_degree: int, basis: dict, diff: dict | None = None,
                 max_degree: int | None = None, check: bool = True):
        if basis:
            lo, hi = min(basis), max(basis)
        else:
            lo, hi = min_degree, min_degree - 1
        self.min_degree = min(min_degree, lo)
        self.max_degree = max(hi, max_degree if max_degree is not None else hi)
        self.basis = {t: tuple(basis.get(t, ())) for t in range(self.min_degree, self.max_degree + 1)}
        self.diff: dict[int, SparseIntMatrix] = {}
        diff = diff or {}
        for t in range(self.min_degree, self.max_degree):
            m = diff.get(t)
            shape = (self.dim(t + 1), self.dim(t))
            if m is None:
                m = SparseIntMatrix.zero(*shape)
            elif m.shape != shape:
                raise InvalidInputError(f"differential in degree {t} has shape {m.shape}, expected {shape}")
            self.diff[t] = m
        extra = set(diff) - set(self.diff)
        for t in extra:
            if not diff[t].is_zero() and (self.dim(t) or self.dim(t + 1)):
                raise InvalidInputError(f"differential given outside the window at degree {t}")
        if check:
            validate(self)

    @classmethod
    def empty(cls) -> "CochainComplex":
        return cls(0, {})

    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def dim(self, t: int) -> int:
        return len(self.basis.get(t, ()))

    def dims(self) -> dict[int, int]:
        return {t: self.dim(t) for t in self.degrees()}

    def d(self, t: int) -> SparseIntMatrix:
        m = self.diff.get(t)
        return m if m is not None else SparseIntMatrix.zero(self.dim(t + 1), self.dim(t))

    def index(self, t: int) -> dict:
        return {lab: i for i, lab in enumerate(self.basis.get(t, ()))}

    def is_empty(self) -> bool:
        return all(self.dim(t) == 0 for t in self.degrees())

    def trimmed(self) -> "CochainComplex":
        """Same complex with zero terms at either end of the window dropped."""
        nz = [t for t in self.degrees() if self.dim(t)]
        if not nz:
            return CochainComplex.empty()
        lo, hi = nz[0], nz[-1]
        return CochainComplex(lo, {t: self.basis[t] for t in range(lo, hi + 1)},
                              {t: self.diff[t] for t in range(lo, hi)}, max_degree=hi, check=False)

    def euler(self) -> int:
        return sum((-1) ** t * self.dim(t) for t in self.degrees())

    def __repr__(self) -> str:
        return f"CochainComplex(dims={self.dims()})"


def validate(c: CochainComplex) -> None:
    """Check ``d_{t+1} d_t = 0`` exactly; raise ValidationError otherwise."""
    for t in range(c.min_degree, c.max_degree - 1):
        comp = multiply(c.d(t + 1), c.d(t))
        if not comp.is_zero():
            (_, j), _ = next(comp.entries())
            raise ValidationError(f"d^2 != 0 starting in degree {t}", degree=t,
                                  witness=c.basis[t][j])


@dataclass
class CohomologyReport:
    ranks: dict[int, int]
    dims: dict[int, int]
    all_ones: dict[int, bool | None] = field(default_factory=dict)
    euler: int = 0

    def nonzero(self) -> dict[int, int]:
        return {t: r for t, r in self.ranks.items() if r}


def differential_ranks(c: CochainComplex) -> dict[int, int]:
    return {t: rank_exact(c.d(t)) for t in range(c.min_degree, c.max_degree)}


def cohomology(c: CochainComplex, snf: bool = False) -> CohomologyReport:
    """Free ranks of H^t over Q, optionally with SNF all-ones flags per differential.

    When every invariant factor of every differential is 1, the integral
    cohomology is free of the reported ranks.
    """
    rk = differential_ranks(c)
    ranks = {}
    for t in c.degrees():
        ranks[t] = c.dim(t) - rk.get(t, 0) - rk.get(t - 1, 0)
    flags: dict[int, bool | None] = {}
    if snf:
        for t in range(c.min_degree, c.max_degree):
            rep = smith_normal_form(c.d(t))
            if rep.rank != rk[t]:
                raise ValidationError("SNF rank disagrees with elimination rank", degree=t)
            flags[t] = rep.all_ones
    return CohomologyReport(ranks, c.dims(), flags, c.euler())


def shift(c: CochainComplex, p: int) -> CochainComplex:
    """``C[p]^n = C^{n-p}``; differentials are carried over unchanged."""
    return CochainComplex(c.min_degree + p, {t + p: b for t, b in c.basis.items()},
                          {t + p: m for t, m in c.diff.items()},
                          max_degree=c.max_degree + p, check=False)


def permute_basis(c: CochainComplex, t: int, perm) -> CochainComplex:
    """Reorder the degree-t basis: new position k holds old element ``perm[k]``."""
    perm = list(perm)
    if sorted(perm) != list(range(c.dim(t))):
        raise InvalidInputError("not a permutation of the degree basis")
    basis = dict(c.basis)
    basis[t] = tuple(c.basis[t][i] for i in perm)
    diff = dict(c.diff)
    if t in diff:
        diff[t] = diff[t].select(None, perm)
    if t - 1 in diff:
        diff[t - 1] = diff[t - 1].select(perm, None)
    return CochainComplex(c.min_degree, basis, diff, max_degree=c.max_degree, check=False)


# -- chain maps -------------------------------------------------------------

class ChainMap:
    """Degreewise matrices ``maps[t] : source^t -> target^t``."""

    def __init__(self, source: CochainComplex, target: CochainComplex, maps: dict,
                 check: bool = True):
        self.source = source
        self.target = target
        self.maps: dict[int, SparseIntMatrix] = {}
        for t in _union_degrees(source, target):
            m = maps.get(t)
            shape = (target.dim(t), source.dim(t))
            if m is None:
                m = SparseIntMatrix.zero(*shape)
            elif m.shape != shape:
                raise InvalidInputError(f"chain map in degree {t} has shape {m.shape}, expected {shape}")
            self.maps[t] = m
        if check:
            validate_chain_map(self)

    def at(self, t: int) -> SparseIntMatrix:
        m = self.maps.get(t)
        return m if m is not None else SparseIntMatrix.zero(self.target.dim(t), self.source.dim(t))

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        return ChainMap(other.source, self.target,
                        {t: multiply(self.at(t), other.at(t)) for t in _union_degrees(other.source, self.target)},
                        check=False)

    @classmethod
    def identity(cls, c: CochainComplex) -> "ChainMap":
        return cls(c, c, {t: SparseIntMatrix.identity(c.dim(t)) for t in c.degrees()}, check=False)

    @classmethod
    def zero(cls, s: CochainComplex, t: CochainComplex) -> "ChainMap":
        return cls(s, t, {}, check=False)


def _union_degrees(a: CochainComplex, b: CochainComplex) -> range:
    los = [c.min_degree for c in (a, b) if not c.is_empty()] or [0]
    his = [c.max_degree for c in (a, b) if not c.is_empty()] or [-1]
    return range(min(los), max(his) + 1)


def validate_chain_map(f: ChainMap) -> None:
    """Check ``d_B f_t = f_{t+1} d_A`` in every degree."""
    for t in _union_degrees(f.source, f.target):
        lhs = multiply(f.target.d(t), f.at(t))
        rhs = multiply(f.at(t + 1), f.source.d(t))
        diff = lhs - rhs
        if not diff.is_zero():
            (_, j), _ = next(diff.entries())
            raise ValidationError(f"map does not commute with differentials in degree {t}",
                                  degree=t, witness=f.source.basis[t][j])


def verify_ses(f: ChainMap, g: ChainMap) -> None:
    """Degreewise exactness of ``0 -> A -f-> B -g-> C -> 0`` by rank arithmetic."""
    if f.target is not g.source and f.target.dims() != g.source.dims():
        raise InvalidInputError("maps are not composable")
    validate_chain_map(f)
    validate_chain_map(g)
    a, b, c = f.source, f.target, g.target
    for t in _union_degrees(a, c):
        rf, rg = rank_exact(f.at(t)), rank_exact(g.at(t))
        if rf != a.dim(t):
            raise ValidationError(f"first map is not injective in degree {t}", degree=t)
        if rg != c.dim(t):
            raise ValidationError(f"second map is not surjective in degree {t}", degree=t)
        if not multiply(g.at(t), f.at(t)).is_zero():
            raise ValidationError(f"composite is nonzero in degree {t}", degree=t)
        # im f = ker g  <=>  rank f = dim B - rank g, given g f = 0
        if rf != b.dim(t) - rg:
            raise ValidationError(f"image differs from kernel in degree {t}", degree=t)
    for t in b.degrees():
        if b.dim(t) != a.dim(t) + c.dim(t):
            raise ValidationError(f"middle term has the wrong size in degree {t}", degree=t)


def cohomology_representatives(c: CochainComplex, t: int) -> list[dict]:
    """Kernel vectors of ``d_t`` independent modulo the image of ``d_{t-1}``.

    Returned as sparse rational vectors; deterministic given the basis order.
    """
    ech = IncrementalEchelon()
    prev = c.d(t - 1)
    for j, col in prev.columns().items():
        ech.add(col)
    reps = []
    for v in kernel_basis_sparse(c.d(t)):
        if ech.add(v):
            reps.append(v)
    return reps


@dataclass
class QuasiIsoReport:
    ok: bool
    source_ranks: dict[int, int]
    target_ranks: dict[int, int]
    failures: list[int]

    def __bool__(self) -> bool:
        return self.ok


def quasi_iso_check(f: ChainMap, validate_map: bool = True) -> QuasiIsoReport:
    """Check that ``f`` induces isomorphisms on cohomology over Q.

    In each degree the images of cohomology representatives of the source,
    together with the boundaries of the target, must be independent; with
    equal cohomology ranks this makes the induced map bijective.
    """
    if validate_map:
        validate_chain_map(f)
    src, tgt = f.source, f.target
    hs, ht = cohomology(src).ranks, cohomology(tgt).ranks
    failures = []
    for t in _union_degrees(src, tgt):
        rs, rt = hs.get(t, 0), ht.get(t, 0)
        if rs != rt:
            failures.append(t)
            continue
        if rs == 0:
            continue
        reps = cohomology_representatives(src, t)
        images = multiply(f.at(t), columns_matrix(reps, src.dim(t)))
        bdry = tgt.d(t - 1)
        stacked = hstack([bdry, images], rows=tgt.dim(t))
        if rank_exact(stacked) != rank_exact(bdry) + len(reps):
            failures.append(t)
    return QuasiIsoReport(not failures, hs, ht, failures)


def induced_rank(f: ChainMap, t: int) -> int:
    """Rank of the map H^t(source) -> H^t(target) induced by ``f``."""
    reps = cohomology_representatives(f.source, t)
    if not reps:
        return 0
    images = multiply(f.at(t), columns_matrix(reps, f.source.dim(t)))
    bdry = f.target.d(t - 1)
    return rank_exact(hstack([bdry, images], rows=f.target.dim(t))) - rank_exact(bdry)


def mapping_cone(f: ChainMap) -> CochainComplex:
    """Cone(f)^n = A^{n+1} (+) B^n with d(a, b) = (-d_A a, f a + d_B b)."""
    a, b = f.source, f.target
    degs = _union_degrees(a, b)
    lo, hi = degs.start - 1, degs.stop - 1
    basis = {}
    diff = {}
    for n in range(lo, hi + 1):
        basis[n] = tuple(("src", x) for x in a.basis.get(n + 1, ())) + \
            tuple(("tgt", y) for y in b.basis.get(n, ()))
    for n in range(lo, hi):
        da = a.d(n + 1)
        fa = f.at(n + 1)
        db = b.d(n)
        top = hstack([-da, SparseIntMatrix.zero(a.dim(n + 2), b.dim(n))], rows=a.dim(n + 2))
        bot = hstack([fa, db], rows=b.dim(n + 1))
        diff[n] = vstack([top, bot], cols=a.dim(n + 1) + b.dim(n))
    return CochainComplex(lo, basis, diff, max_degree=hi)


def is_acyclic(c: CochainComplex) -> bool:
    return not cohomology(c).nonzero()
