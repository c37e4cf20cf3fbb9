"""Exact sparse linear algebra over the integers and rationals.

Matrices are stored as dictionaries of row dictionaries holding nonzero
Python integers.  Rank uses fraction-free sparse elimination, kernels are
computed over ``Fraction``, and the Smith normal form strips unit pivots
sparsely before finishing on a small dense remainder.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InvalidInputError


class SparseIntMatrix:
    """Immutable integer matrix with only nonzero entries stored."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise InvalidInputError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, int]] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, j), v in items:
                if not (0 <= i < rows and 0 <= j < cols):
                    raise InvalidInputError(f"entry ({i}, {j}) outside {rows}x{cols}")
                if v:
                    row = data.setdefault(i, {})
                    s = row.get(j, 0) + int(v)
                    if s:
                        row[j] = s
                    else:
                        del row[j]
                        if not row:
                            del data[i]
        self._data = data
        self._hash = None

    @classmethod
    def _from_rows(cls, rows: int, cols: int, data: dict) -> "SparseIntMatrix":
        # trusted constructor: data already clean
        m = cls.__new__(cls)
        m.rows, m.cols, m._data, m._hash = rows, cols, data, None
        return m

    @classmethod
    def from_dense(cls, dense, cols: int | None = None) -> "SparseIntMatrix":
        dense = [list(r) for r in dense]
        n = len(dense)
        c = cols if cols is not None else (len(dense[0]) if dense else 0)
        data = {}
        for i, r in enumerate(dense):
            if len(r) != c:
                raise InvalidInputError("ragged dense matrix")
            row = {j: int(v) for j, v in enumerate(r) if v}
            if row:
                data[i] = row
        return cls._from_rows(n, c, data)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls._from_rows(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseIntMatrix":
        return cls._from_rows(rows, cols, {})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def get(self, i: int, j: int) -> int:
        return self._data.get(i, {}).get(j, 0)

    def row(self, i: int) -> dict[int, int]:
        """Copy of row i as {col: value}."""
        return dict(self._data.get(i, {}))

    def row_items(self):
        """Iterate ``(i, {col: value})`` over nonzero rows (do not mutate)."""
        return self._data.items()

    def entries(self):
        for i in sorted(self._data):
            row = self._data[i]
            for j in sorted(row):
                yield (i, j), row[j]

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, row in self._data.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not self._data

    def transpose(self) -> "SparseIntMatrix":
        data: dict[int, dict[int, int]] = {}
        for i, row in self._data.items():
            for j, v in row.items():
                data.setdefault(j, {})[i] = v
        return SparseIntMatrix._from_rows(self.cols, self.rows, data)

    def columns(self) -> dict[int, dict[int, int]]:
        return self.transpose()._data

    def __neg__(self) -> "SparseIntMatrix":
        return self.scale(-1)

    def scale(self, c: int) -> "SparseIntMatrix":
        if c == 0:
            return SparseIntMatrix.zero(self.rows, self.cols)
        return SparseIntMatrix._from_rows(
            self.rows, self.cols,
            {i: {j: c * v for j, v in row.items()} for i, row in self._data.items()})

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.shape != other.shape:
            raise InvalidInputError(f"cannot add {self.shape} and {other.shape}")
        data = {i: dict(r) for i, r in self._data.items()}
        for i, row in other._data.items():
            tgt = data.setdefault(i, {})
            for j, v in row.items():
                s = tgt.get(j, 0) + v
                if s:
                    tgt[j] = s
                else:
                    del tgt[j]
            if not tgt:
                del data[i]
        return SparseIntMatrix._from_rows(self.rows, self.cols, data)

    def __sub__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        return self + (-other)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, tuple(self.entries())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def apply(self, vec) -> list:
        """Matrix times a dense vector (entries may be int or Fraction)."""
        if len(vec) != self.cols:
            raise InvalidInputError("vector length does not match column count")
        out = [0] * self.rows
        for i, row in self._data.items():
            out[i] = sum(v * vec[j] for j, v in row.items())
        return out

    def select(self, row_idx=None, col_idx=None) -> "SparseIntMatrix":
        """Submatrix on the given ordered row and column index lists."""
        row_idx = list(range(self.rows)) if row_idx is None else list(row_idx)
        col_idx = list(range(self.cols)) if col_idx is None else list(col_idx)
        cpos = {c: k for k, c in enumerate(col_idx)}
        data = {}
        for k, i in enumerate(row_idx):
            row = self._data.get(i)
            if not row:
                continue
            new = {cpos[j]: v for j, v in row.items() if j in cpos}
            if new:
                data[k] = new
        return SparseIntMatrix._from_rows(len(row_idx), len(col_idx), data)


def multiply(a: SparseIntMatrix, b: SparseIntMatrix) -> SparseIntMatrix:
    """Exact product ``a @ b``."""
    if a.cols != b.rows:
        raise InvalidInputError(f"cannot multiply {a.shape} by {b.shape}")
    bdata = b._data
    data = {}
    for i, arow in a._data.items():
        acc: dict[int, int] = {}
        for k, av in arow.items():
            brow = bdata.get(k)
            if brow:
                for j, bv in brow.items():
                    acc[j] = acc.get(j, 0) + av * bv
        acc = {j: v for j, v in acc.items() if v}
        if acc:
            data[i] = acc
    return SparseIntMatrix._from_rows(a.rows, b.cols, data)


def hstack(blocks, rows: int | None = None) -> SparseIntMatrix:
    blocks = list(blocks)
    if rows is None:
        if not blocks:
            raise InvalidInputError("hstack of nothing needs an explicit row count")
        rows = blocks[0].rows
    data: dict[int, dict[int, int]] = {}
    off = 0
    for m in blocks:
        if m.rows != rows:
            raise InvalidInputError("hstack row mismatch")
        for i, row in m._data.items():
            tgt = data.setdefault(i, {})
            for j, v in row.items():
                tgt[j + off] = v
        off += m.cols
    return SparseIntMatrix._from_rows(rows, off, data)


def vstack(blocks, cols: int | None = None) -> SparseIntMatrix:
    return hstack([m.transpose() for m in blocks], rows=cols).transpose()


def block_diag(blocks) -> SparseIntMatrix:
    data = {}
    r0 = c0 = 0
    for m in blocks:
        for i, row in m._data.items():
            data[i + r0] = {j + c0: v for j, v in row.items()}
        r0 += m.rows
        c0 += m.cols
    return SparseIntMatrix._from_rows(r0, c0, data)


# -- rank -------------------------------------------------------------------

def _content(row: dict) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def _eliminate(data: dict, ncols: int, field: bool, gauss_jordan: bool = False):
    """Sparse elimination on a mutable {row: {col: val}} dict.

    Pivot columns are chosen by fewest nonzeros (lazy heap), then the
    shortest row holding a unit entry, falling back to the smallest
    magnitude.  Over the integers (``field=False``) updates are
    fraction-free: ``r <- p*r - a*pivot_row`` followed by content removal.
    Returns the list of (pivot_row, pivot_col) and, with ``gauss_jordan``,
    the reduced pivot rows (normalised so the pivot is 1).
    """
    colrows: dict[int, set] = {}
    for i, row in data.items():
        for j in row:
            colrows.setdefault(j, set()).add(i)
    heap = [(len(s), j) for j, s in colrows.items()]
    heapq.heapify(heap)
    active = set(data)
    pivots = []
    done_rows: dict[int, dict] = {}
    while heap:
        cnt, c = heapq.heappop(heap)
        rs = colrows.get(c)
        if not rs:
            continue
        cand = [i for i in rs if i in active]
        if len(cand) != cnt:
            if cand:
                heapq.heappush(heap, (len(cand), c))
            else:
                colrows[c] = set(i for i in rs if i not in active)
            continue
        best = None
        for i in cand:
            v = data[i][c]
            key = (0 if v in (1, -1) else 1, len(data[i]), abs(v), i)
            if best is None or key < best[0]:
                best = (key, i)
        pr = best[1]
        prow = data[pr]
        p = prow[c]
        if field and p != 1:
            inv = 1 / Fraction(p)
            prow = {j: v * inv for j, v in prow.items()}
            data[pr] = prow
            p = 1
        active.discard(pr)
        pivots.append((pr, c))
        targets = [i for i in colrows[c] if i != pr and (gauss_jordan or i in active)]
        for i in targets:
            row = data[i]
            a = row.get(c)
            if not a:
                continue
            if field:
                f = a / p
                for j, v in prow.items():
                    s = row.get(j, 0) - f * v
                    if s:
                        if j not in row:
                            colrows.setdefault(j, set()).add(i)
                        row[j] = s
                    else:
                        row.pop(j, None)
                        colrows[j].discard(i)
            elif p in (1, -1):
                f = a * p
                for j, v in prow.items():
                    s = row.get(j, 0) - f * v
                    if s:
                        if j not in row:
                            colrows.setdefault(j, set()).add(i)
                        row[j] = s
                    else:
                        row.pop(j, None)
                        colrows[j].discard(i)
            else:
                g = gcd(a, p)
                pa, aa = p // g, a // g
                new = {}
                for j in set(row) | set(prow):
                    s = pa * row.get(j, 0) - aa * prow.get(j, 0)
                    if s:
                        new[j] = s
                for j in row:
                    if j not in new:
                        colrows[j].discard(i)
                for j in new:
                    if j not in row:
                        colrows.setdefault(j, set()).add(i)
                k = _content(new) if new else 1
                if k > 1:
                    new = {j: v // k for j, v in new.items()}
                data[i] = new
                row = new
            if not row:
                colrows[c].discard(i)
        # pivot row leaves the active set: drop it from the column counts
        for j in prow:
            if j != c:
                s = colrows.get(j)
                if s is not None and pr in s:
                    if not gauss_jordan:
                        s.discard(pr)
                    n_act = sum(1 for i in s if i in active)
                    if n_act:
                        heapq.heappush(heap, (n_act, j))
        if gauss_jordan:
            done_rows[pr] = prow
    return pivots, done_rows


def rank_exact(m: SparseIntMatrix) -> int:
    """Rank over the rationals by fraction-free sparse elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate along the smaller dimension's rows for less bookkeeping
    src = m if m.rows <= m.cols else m.transpose()
    data = {i: dict(r) for i, r in src._data.items()}
    pivots, _ = _eliminate(data, src.cols, field=False)
    return len(pivots)


def rank_dense_naive(dense) -> int:
    """Textbook Gaussian elimination over Fraction; used as an oracle."""
    rows = [[Fraction(v) for v in r] for r in dense]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def rank_bareiss(dense) -> int:
    """Dense fraction-free (Bareiss) elimination rank; a second oracle."""
    a = [list(map(int, r)) for r in dense]
    if not a:
        return 0
    n, m = len(a), len(a[0])
    prev = 1
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n):
            for j in range(c + 1, m):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == n:
            break
    return r


# -- kernels ----------------------------------------------------------------

def rref_pivots(m: SparseIntMatrix):
    """Reduced row echelon data over Q: ``{pivot_col: {col: Fraction}}`` rows."""
    data = {i: {j: Fraction(v) for j, v in r.items()} for i, r in m._data.items()}
    pivots, done = _eliminate(data, m.cols, field=True, gauss_jordan=True)
    return {c: done[r] for r, c in pivots}


def kernel_basis(m: SparseIntMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel over Q, one vector per free column.

    Each vector has a 1 in its free column and zeros in the other free
    columns; order follows the free column index.
    """
    return [tuple(_densify(v, m.cols)) for v in kernel_basis_sparse(m)]


def kernel_basis_sparse(m: SparseIntMatrix) -> list[dict[int, Fraction]]:
    return kernel_with_free_columns(m)[1]


def kernel_with_free_columns(m: SparseIntMatrix):
    """``(free_columns, vectors)``: vector k is 1 at free column k, 0 at the others."""
    piv = rref_pivots(m)
    free = [j for j in range(m.cols) if j not in piv]
    vecs = {j: {j: Fraction(1)} for j in free}
    for c, row in piv.items():
        for j, v in row.items():
            if j != c:
                vecs[j][c] = -v
    return free, [vecs[j] for j in free]


def _densify(vec: dict, n: int) -> list:
    out = [Fraction(0)] * n
    for j, v in vec.items():
        out[j] = v
    return out


def integer_vector(vec) -> list[int]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    items = list(vec.items()) if isinstance(vec, dict) else list(enumerate(vec))
    den = 1
    for _, v in items:
        den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
    ints = [(j, int(Fraction(v) * den)) for j, v in items]
    g = 0
    for _, v in ints:
        g = gcd(g, v)
    g = g or 1
    if isinstance(vec, dict):
        return {j: v // g for j, v in ints if v}
    return [v // g for _, v in ints]


def columns_matrix(vectors, n: int) -> SparseIntMatrix:
    """Integer matrix whose columns are the (integer-scaled) given vectors."""
    entries = {}
    for k, v in enumerate(vectors):
        iv = integer_vector(dict(v) if isinstance(v, dict) else
                            {j: x for j, x in enumerate(v) if x})
        for j, x in iv.items():
            entries[(j, k)] = x
    return SparseIntMatrix(n, len(vectors), entries)


# -- Smith normal form ------------------------------------------------------

@dataclass(frozen=True)
class SnfReport:
    invariant_factors: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if len(self.invariant_factors) != self.rank:
            raise InvalidInputError("invariant factor count must equal the rank")
        for d1, d2 in zip(self.invariant_factors, self.invariant_factors[1:]):
            if d1 <= 0 or d2 % d1:
                raise InvalidInputError("invariant factors must form a divisibility chain")

    @property
    def all_ones(self) -> bool:
        return all(d == 1 for d in self.invariant_factors)


def _normalize_diagonal(diag: list[int]) -> tuple[int, ...]:
    """Turn any nonzero diagonal into the divisibility-chain form."""
    d = sorted(abs(x) for x in diag if x)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                g = gcd(d[i], d[j])
                if g != d[i]:
                    l = d[i] * d[j] // g
                    d[i], d[j] = g, l
                    changed = True
        d.sort()
    return tuple(d)


def smith_normal_form_dense(dense) -> SnfReport:
    """Classical dense SNF by repeated gcd row/column reduction."""
    a = [list(map(int, r)) for r in dense]
    n = len(a)
    m = len(a[0]) if n else 0
    diag = []
    t = 0
    while t < min(n, m):
        # choose smallest nonzero entry in the trailing block
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if a[i][j] and (best is None or abs(a[i][j]) < best[0]):
                    best = (abs(a[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                break
            # move a smaller remainder into the pivot position
            best = None
            for i in range(t, n):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, None)
            for j in range(t, m):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), None, j)
            _, i, j = best
            if i is not None:
                a[t], a[i] = a[i], a[t]
            else:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(a[t][t])
        t += 1
    factors = _normalize_diagonal(diag)
    return SnfReport(factors, len(factors))


def smith_normal_form(m: SparseIntMatrix) -> SnfReport:
    """Invariant factors over Z.

    Unit pivots are removed sparsely (a unit pivot contributes a factor 1
    and, after clearing its column by row operations, its row can be
    cleared by column operations touching nothing else).  The remaining
    block has no unit entries and is finished densely.
    """
    data = {i: dict(r) for i, r in m._data.items()}
    colrows: dict[int, set] = {}
    for i, row in data.items():
        for j in row:
            colrows.setdefault(j, set()).add(i)
    ones = 0
    while True:
        # pick a unit entry with small Markowitz cost
        best = None
        for i, row in data.items():
            for j, v in row.items():
                if v in (1, -1):
                    cost = (len(row) - 1) * (len(colrows[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pr, c = best
        prow = data.pop(pr)
        p = prow[c]
        for j in prow:
            colrows[j].discard(pr)
        for i in list(colrows[c]):
            row = data[i]
            f = row[c] * p
            for j, v in prow.items():
                s = row.get(j, 0) - f * v
                if s:
                    if j not in row:
                        colrows.setdefault(j, set()).add(i)
                    row[j] = s
                else:
                    row.pop(j, None)
                    colrows[j].discard(i)
            if not row:
                del data[i]
        # column c is now zero; clearing the pivot row by column ops is free
        del colrows[c]
        ones += 1
    rest_rows = sorted(data)
    rest_cols = sorted({j for r in data.values() for j in r})
    rest = [[data[i].get(j, 0) for j in rest_cols] for i in rest_rows]
    tail = smith_normal_form_dense(rest) if rest else SnfReport((), 0)
    factors = _normalize_diagonal([1] * ones + list(tail.invariant_factors))
    return SnfReport(factors, len(factors))


class IncrementalEchelon:
    """Rational row echelon basis grown one vector at a time.

    ``add(v)`` reduces ``v`` against the stored basis and keeps it when it
    is independent; it reports whether it did.
    """

    def __init__(self):
        self._rows: dict[int, dict[int, Fraction]] = {}  # pivot col -> row

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec) -> dict[int, Fraction]:
        v = {j: Fraction(x) for j, x in (vec.items() if isinstance(vec, dict)
                                          else enumerate(vec)) if x}
        # stored rows vanish on each other's pivots, so one pass suffices
        for c in [c for c in v if c in self._rows]:
            a = v[c]
            for j, x in self._rows[c].items():
                s = v.get(j, 0) - a * x
                if s:
                    v[j] = s
                else:
                    v.pop(j, None)
        return v

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        c = min(v)
        inv = 1 / v[c]
        v = {j: x * inv for j, x in v.items()}
        # keep stored rows reduced with respect to the new pivot
        for row in self._rows.values():
            a = row.get(c)
            if a:
                for j, x in v.items():
                    s = row.get(j, 0) - a * x
                    if s:
                        row[j] = s
                    else:
                        row.pop(j, None)
        self._rows[c] = v
        return True
