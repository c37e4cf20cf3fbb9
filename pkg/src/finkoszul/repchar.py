"""Characters of products of symmetric groups.

Class functions are stored on tuples of partitions, one partition per
factor.  For a pair of groups ``S_a x S_b`` acting on surjections
``b ->> a`` the convention is ``(sigma, tau) . f = sigma o f o tau``.
Conjugacy class representatives are the permutations whose cycles are
blocks of consecutive integers, longest first.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

from .chaincx import cohomology_representatives
from .errors import BudgetExceededError, InvalidInputError
from .exactla import IncrementalEchelon, SparseIntMatrix, kernel_with_free_columns, multiply
from .fikoszul import action_matrix, build_C, restriction_map
from .setcomb import surjection_table

DEFAULT_MAX_B = 6

IntPartition = tuple  # weakly decreasing positive integers


# -- partitions and classes ---------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[IntPartition, ...]:
    """Partitions of n in reverse lexicographic order, (n) first."""
    if n < 0:
        raise InvalidInputError("n must be non-negative")

    def gen(rest, cap):
        if rest == 0:
            yield ()
            return
        for k in range(min(rest, cap), 0, -1):
            for tail in gen(rest - k, k):
                yield (k,) + tail

    return tuple(gen(n, n))


def is_partition(lam, n: int | None = None) -> bool:
    lam = tuple(lam)
    ok = all(p > 0 for p in lam) and all(x >= y for x, y in zip(lam, lam[1:]))
    return ok and (n is None or sum(lam) == n)


def z_value(lam: IntPartition) -> int:
    """Order of the centralizer of a permutation of cycle type lam."""
    out = 1
    for part in set(lam):
        m = lam.count(part)
        out *= part ** m * factorial(m)
    return out


def class_size(lam: IntPartition) -> int:
    return factorial(sum(lam)) // z_value(lam)


def class_representative(lam: IntPartition) -> tuple[int, ...]:
    """Permutation (images of 1..n) with cycles on consecutive blocks."""
    perm = []
    start = 1
    for part in lam:
        block = list(range(start, start + part))
        perm.extend(block[1:] + block[:1])
        start += part
    return tuple(perm)


def cycle_type(perm) -> IntPartition:
    n = len(perm)
    seen = [False] * n
    out = []
    for i in range(n):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j] - 1
                length += 1
            out.append(length)
    return tuple(sorted(out, reverse=True))


def partition_sign(lam: IntPartition) -> int:
    return -1 if sum(p - 1 for p in lam) & 1 else 1


# -- class functions ----------------------------------------------------------

class ClassFunction:
    """Integer (or rational) function on class tuples of S_{n_1} x ... x S_{n_k}."""

    def __init__(self, sizes, values: dict):
        self.sizes = tuple(sizes)
        keys = list(product(*(partitions(n) for n in self.sizes)))
        missing = [k for k in keys if k not in values]
        if missing:
            raise InvalidInputError(f"class function undefined on {missing[0]}")
        self.values = {k: values[k] for k in keys}

    @classmethod
    def from_function(cls, sizes, fn) -> "ClassFunction":
        sizes = tuple(sizes)
        return cls(sizes, {k: fn(*k) for k in product(*(partitions(n) for n in sizes))})

    @property
    def n_left(self) -> int:
        return self.sizes[0]

    @property
    def n_right(self) -> int:
        return self.sizes[-1]

    def keys(self):
        return self.values.keys()

    def __getitem__(self, key):
        return self.values[tuple(tuple(k) for k in key)]

    def _check_same(self, other):
        if self.sizes != other.sizes:
            raise InvalidInputError(f"class functions on {self.sizes} and {other.sizes}")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._check_same(other)
        return ClassFunction(self.sizes, {k: v + other.values[k] for k, v in self.values.items()})

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        return self + other.scale(-1)

    def scale(self, c) -> "ClassFunction":
        return ClassFunction(self.sizes, {k: c * v for k, v in self.values.items()})

    def __mul__(self, other: "ClassFunction") -> "ClassFunction":
        self._check_same(other)
        return ClassFunction(self.sizes, {k: v * other.values[k] for k, v in self.values.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassFunction) and self.sizes == other.sizes and self.values == other.values

    def __repr__(self) -> str:
        return f"ClassFunction(sizes={self.sizes}, values={self.values})"

    def identity_value(self):
        return self.values[tuple((1,) * n for n in self.sizes)]

    def restrict_to_factor(self, k: int) -> "ClassFunction":
        """Restriction to S_{n_k}, the other factors sitting at the identity."""
        ident = [(1,) * n for n in self.sizes]

        def fn(lam):
            key = list(ident)
            key[k] = lam
            return self.values[tuple(key)]

        return ClassFunction.from_function((self.sizes[k],), fn)

    def inner(self, other: "ClassFunction") -> Fraction:
        """<chi, psi> for real-valued class functions."""
        self._check_same(other)
        total = Fraction(0)
        for k, v in self.values.items():
            w = 1
            for lam in k:
                w *= z_value(lam)
            total += Fraction(v * other.values[k], w)
        return total

    def to_json(self) -> dict:
        return {"sizes": list(self.sizes),
                "values": [[[list(l) for l in k], _jsonable(v)] for k, v in self.values.items()]}


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return v


def outer_product(*chis: ClassFunction) -> ClassFunction:
    sizes = tuple(n for c in chis for n in c.sizes)
    cuts = []
    pos = 0
    for c in chis:
        cuts.append((pos, pos + len(c.sizes)))
        pos += len(c.sizes)

    def fn(*key):
        out = 1
        for c, (lo, hi) in zip(chis, cuts):
            out *= c.values[tuple(key[lo:hi])]
        return out

    return ClassFunction.from_function(sizes, fn)


def trivial_character(n: int) -> ClassFunction:
    return ClassFunction.from_function((n,), lambda lam: 1)


def sign_character(n: int) -> ClassFunction:
    return ClassFunction.from_function((n,), partition_sign)


def _splittings(lam: IntPartition, m: int):
    """Ways to split the multiset of parts of lam into (mu |- m, nu |- rest).

    Yields (mu, nu); each distinct pair once.
    """
    counts = {}
    for p in lam:
        counts[p] = counts.get(p, 0) + 1
    parts = sorted(counts, reverse=True)

    def rec(i, left):
        if i == len(parts):
            if left == 0:
                yield {}
            return
        p = parts[i]
        for k in range(counts[p] + 1):
            if k * p > left:
                break
            for rest in rec(i + 1, left - k * p):
                d = dict(rest)
                d[p] = k
                yield d

    for choice in rec(0, m):
        mu, nu = [], []
        for p in parts:
            mu += [p] * choice.get(p, 0)
            nu += [p] * (counts[p] - choice.get(p, 0))
        yield tuple(mu), tuple(nu)


def induce(chi: ClassFunction, factor: int | None = None) -> ClassFunction:
    """Induce along S_m x S_n <= S_{m+n} on factors ``factor`` and ``factor + 1``.

    Ind(phi)(lam) = sum over splittings lam = mu u nu of
    z(lam) / (z(mu) z(nu)) * phi(mu, nu).  By default the last two
    factors are merged.
    """
    if len(chi.sizes) < 2:
        raise InvalidInputError("need at least two factors to induce")
    k = len(chi.sizes) - 2 if factor is None else factor
    m, n = chi.sizes[k], chi.sizes[k + 1]
    sizes = chi.sizes[:k] + (m + n,) + chi.sizes[k + 2:]

    def fn(*key):
        lam = key[k]
        total = 0
        for mu, nu in _splittings(lam, m):
            full = key[:k] + (mu, nu) + key[k + 1:]
            total += Fraction(z_value(lam), z_value(mu) * z_value(nu)) * chi.values[full]
        return int(total) if total.denominator == 1 else total

    return ClassFunction.from_function(sizes, fn)


# -- characters of the hom-sets and of H^0 ----------------------------------

def _check_budget(b: int, max_b: int | None):
    cap = DEFAULT_MAX_B if max_b is None else max_b
    if b > cap:
        raise BudgetExceededError(f"b = {b} exceeds the character budget {cap}")


def act_on_surjection(f, sigma, tau) -> tuple[int, ...]:
    """sigma o f o tau as a value array."""
    return tuple(sigma[f[tau[i] - 1] - 1] for i in range(len(f)))


def perm_character_homOmega(b: int, a: int, max_b: int | None = None) -> ClassFunction:
    """Fixed points of (sigma, tau) on surjections b ->> a; sizes (a, b)."""
    if a < 0 or b < 0:
        raise InvalidInputError("sizes must be non-negative")
    _check_budget(b, max_b)
    surj = surjection_table(b, a)[0]

    def fn(mu, lam):
        sigma, tau = class_representative(mu), class_representative(lam)
        return sum(1 for f in surj if act_on_surjection(f, sigma, tau) == f)

    return ClassFunction.from_function((a, b), fn)


def virtual_character_H0(b: int, a: int) -> ClassFunction:
    """(-1)^{b-a+1} sgn x sgn + sum_t (-1)^t Ind(chi_hom(b-t, a) x sgn_t)."""
    if not b > a >= 1:
        raise InvalidInputError("needs b > a >= 1")
    total = outer_product(sign_character(a), sign_character(b)).scale((-1) ** (b - a + 1))
    for t in range(b - a + 1):
        term = induce(outer_product(perm_character_homOmega(b - t, a, max_b=b), sign_character(t)))
        total = total + term.scale((-1) ** t)
    return total


def kernel_character_oracle(b: int, a: int, max_b: int | None = None) -> ClassFunction:
    """Traces of class representatives on ker R_{b,a}, computed explicitly."""
    if a < 1 or b < 1:
        raise InvalidInputError("needs a, b >= 1")
    _check_budget(b, max_b)
    r = restriction_map(b, a)
    # coordinates of a kernel vector are its entries at the free columns
    free, kern = kernel_with_free_columns(r)
    surj, idx = surjection_table(b, a)

    def fn(mu, lam):
        sigma, tau = class_representative(mu), class_representative(lam)
        perm = [idx[act_on_surjection(f, sigma, tau)] for f in surj]
        trace = Fraction(0)
        for vec, j in zip(kern, free):
            image = {perm[c]: v for c, v in vec.items()}
            if not multiply(r, _column(image, len(surj))).is_zero():
                raise InvalidInputError("kernel is not stable under the action")
            trace += image.get(j, 0)
        return int(trace) if trace.denominator == 1 else trace

    return ClassFunction.from_function((a, b), fn)


def _column(vec: dict, n: int) -> SparseIntMatrix:
    den = 1
    for v in vec.values():
        den = den * Fraction(v).denominator
    return SparseIntMatrix(n, 1, {(j, 0): int(Fraction(v) * den) for j, v in vec.items()})


def top_degree_character(b: int, a: int) -> ClassFunction:
    """Traces on the rank-one H^{b-a}(C(b, a)) of the S_a x S_b action on C(b, a)."""
    if not b > a >= 1:
        raise InvalidInputError("needs b > a >= 1")
    c = build_C(b, a)
    t = b - a
    reps = cohomology_representatives(c, t)
    if len(reps) != 1:
        raise InvalidInputError(f"H^{t} has rank {len(reps)}, expected 1")
    bdry = IncrementalEchelon()
    for col in c.d(t - 1).columns().values():
        bdry.add(col)
    base = bdry.reduce(reps[0])
    j = min(base)

    def fn(mu, lam):
        m = action_matrix(c, t, class_representative(mu), class_representative(lam), b)
        cols = m.columns()
        image = {}
        for col, v in reps[0].items():
            for row, w in cols.get(col, {}).items():
                image[row] = image.get(row, 0) + w * v
        red = bdry.reduce(image)
        value = red.get(j, 0) / base[j]
        if {k: value * x for k, x in base.items()} != red:
            raise InvalidInputError("image is not a multiple of the class")
        return int(value) if value.denominator == 1 else value

    return ClassFunction.from_function((a, b), fn)


# -- irreducible characters -------------------------------------------------

@lru_cache(maxsize=None)
def irreducible_character_value(lam: IntPartition, mu: IntPartition) -> int:
    """chi^lam at cycle type mu by Murnaghan-Nakayama (rim hooks via beta-sets)."""
    n = sum(lam)
    if sum(mu) != n:
        raise InvalidInputError("partition sizes differ")
    if n == 0:
        return 1
    r, rest = mu[0], mu[1:]
    length = len(lam)
    beta = [lam[i] + length - 1 - i for i in range(length)]
    bset = set(beta)
    total = 0
    for x in beta:
        y = x - r
        if y < 0 or y in bset:
            continue
        height = sum(1 for z in beta if y < z < x)
        new = sorted((bset - {x}) | {y}, reverse=True)
        k = len(new)
        parts = tuple(p for p in (new[i] - (k - 1 - i) for i in range(k)) if p > 0)
        total += (-1) ** height * irreducible_character_value(parts, rest)
    return total


def irreducible_character(lam: IntPartition) -> ClassFunction:
    n = sum(lam)
    return ClassFunction.from_function((n,), lambda mu: irreducible_character_value(tuple(lam), mu))


def decompose_irreducible(chi: ClassFunction) -> list[tuple]:
    """Nonzero multiplicities <chi, chi^{lam_1} x ... x chi^{lam_k}>.

    Returns tuples ``(lam_1, ..., lam_k, multiplicity)``; multiplicities are
    integers for virtual characters and may be negative.
    """
    out = []
    for labels in product(*(partitions(n) for n in chi.sizes)):
        irr = outer_product(*(irreducible_character(l) for l in labels))
        m = chi.inner(irr)
        if m:
            out.append(labels + (int(m) if m.denominator == 1 else m,))
    return out
