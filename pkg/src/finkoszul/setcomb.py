"""Finite-set combinatorics: subsets, surjections, orientations, ordered partitions.

Elements of the ground set ``{1..n}`` are 1-based integers.  A subset is
stored as a bitmask with bit ``i - 1`` set for element ``i``.  Surjections
``{1..b} -> {1..a}`` are tuples of values; a restricted surjection is
re-indexed along the order-preserving bijection of its new domain with
``{1..|s|}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb, factorial

from .errors import InvalidInputError

MAX_GROUND_SIZE = 16


def mask_elements(bits: int) -> tuple[int, ...]:
    """Elements of a bitmask, increasing."""
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


def mask_from_elements(elements) -> int:
    bits = 0
    for x in elements:
        if x < 1:
            raise InvalidInputError(f"elements are 1-based, got {x}")
        bits |= 1 << (x - 1)
    return bits


def full_mask(n: int) -> int:
    return (1 << n) - 1


@lru_cache(maxsize=None)
def subsets_of_size(n: int, k: int) -> tuple[int, ...]:
    """All k-subsets of {1..n} as bitmasks, in decreasing bitmask order."""
    if k < 0 or k > n:
        return ()
    masks = [mask_from_elements(c) for c in combinations(range(1, n + 1), k)]
    masks.sort(reverse=True)
    return tuple(masks)


def submasks(bits: int):
    """Every submask of ``bits`` (including 0 and ``bits``), decreasing."""
    s = bits
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & bits


@dataclass(frozen=True, order=True)
class SubsetMask:
    bits: int
    ground_size: int

    def __post_init__(self):
        if not 0 <= self.ground_size <= MAX_GROUND_SIZE:
            raise InvalidInputError(
                f"ground size {self.ground_size} outside 0..{MAX_GROUND_SIZE}")
        if self.bits < 0 or self.bits >> self.ground_size:
            raise InvalidInputError(
                f"mask {self.bits:#b} exceeds ground set of size {self.ground_size}")

    @classmethod
    def from_elements(cls, elements, ground_size: int) -> "SubsetMask":
        return cls(mask_from_elements(elements), ground_size)

    @classmethod
    def full(cls, ground_size: int) -> "SubsetMask":
        return cls(full_mask(ground_size), ground_size)

    def elements(self) -> tuple[int, ...]:
        return mask_elements(self.bits)

    def complement(self) -> "SubsetMask":
        return SubsetMask(full_mask(self.ground_size) & ~self.bits, self.ground_size)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return 1 <= x <= self.ground_size and bool(self.bits >> (x - 1) & 1)

    def __iter__(self):
        return iter(self.elements())


# -- permutations and orientation signs ------------------------------------

def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (distinct comparable items)."""
    seq = list(seq)
    sign = 1
    seen = [False] * len(seq)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    # cycle decomposition of the sorting permutation
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def wedge_sign(x: int, bits: int) -> int:
    """Sign of ``x ^ omega(s)`` against ``omega(s | {x})``: (-1)^#{y in s: y < x}."""
    return -1 if (bits & ((1 << (x - 1)) - 1)).bit_count() & 1 else 1


def wedge_insert(x: int, s: SubsetMask) -> tuple[int, SubsetMask]:
    """Return ``(sign, s | {x})`` with ``x ^ omega(s) = sign * omega(s | {x})``."""
    if not 1 <= x <= s.ground_size:
        raise InvalidInputError(f"element {x} outside ground set of size {s.ground_size}")
    if x in s:
        raise InvalidInputError(f"element {x} already in {s.elements()}")
    return wedge_sign(x, s.bits), SubsetMask(s.bits | 1 << (x - 1), s.ground_size)


def wedge_word_sign(word) -> int:
    """Coefficient of omega(set(word)) in w1 ^ w2 ^ ... for distinct elements; 0 on repeats."""
    if len(set(word)) != len(word):
        return 0
    return permutation_sign(word)


# -- surjections ------------------------------------------------------------

@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind via the standard recursion."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def count_surjections(b: int, a: int) -> int:
    return factorial(a) * stirling2(b, a)


def ordered_bell(n: int) -> int:
    """Number of ordered partitions of an n-set (Fubini number)."""
    return sum(factorial(k) * stirling2(n, k) for k in range(n + 1))


@dataclass(frozen=True)
class Surjection:
    values: tuple[int, ...]
    codomain_size: int

    def __post_init__(self):
        if not is_surjective(self.values, self.codomain_size):
            raise InvalidInputError(
                f"{self.values} is not a surjection onto {{1..{self.codomain_size}}}")

    @property
    def domain_size(self) -> int:
        return len(self.values)

    def fibres(self) -> tuple[int, ...]:
        """Fibres f^-1(1), ..., f^-1(a) as bitmasks."""
        out = [0] * self.codomain_size
        for i, v in enumerate(self.values):
            out[v - 1] |= 1 << i
        return tuple(out)


def is_surjective(values, a: int) -> bool:
    if any(not 1 <= v <= a for v in values):
        return False
    return len(set(values)) == a


@lru_cache(maxsize=None)
def surjection_table(b: int, a: int) -> tuple[tuple[tuple[int, ...], ...], dict]:
    """Value arrays of all surjections b ->> a in lexicographic order, plus their index."""
    if b < 0 or a < 0:
        raise InvalidInputError("sizes must be non-negative")
    if b > MAX_GROUND_SIZE:
        raise InvalidInputError(f"domain size {b} exceeds cap {MAX_GROUND_SIZE}")
    if a > b or (a == 0 and b > 0):
        rows: tuple = ()
    elif a == 0:
        rows = ((),)
    else:
        rows = tuple(v for v in product(range(1, a + 1), repeat=b) if len(set(v)) == a)
    return rows, {v: i for i, v in enumerate(rows)}


def enumerate_surjections(b: int, a: int) -> list[Surjection]:
    rows, _ = surjection_table(b, a)
    return [Surjection(v, a) for v in rows]


def surjection_index(f: Surjection) -> int:
    return surjection_table(f.domain_size, f.codomain_size)[1][f.values]


def restrict_values(values: tuple[int, ...], bits: int, a: int):
    """Restrict a value array to the positions in ``bits``; None if no longer onto."""
    sub = tuple(values[i - 1] for i in mask_elements(bits))
    if len(set(sub)) != a:
        return None
    return sub


def restrict_surjection(f: Surjection, s: SubsetMask):
    """Restriction of ``f`` to ``s`` re-indexed to {1..|s|}, or None if not surjective."""
    if s.ground_size != f.domain_size:
        raise InvalidInputError(
            f"subset of a {s.ground_size}-set cannot restrict a map on {f.domain_size} elements")
    sub = restrict_values(f.values, s.bits, f.codomain_size)
    return None if sub is None else Surjection(sub, f.codomain_size)


# -- ordered partitions -----------------------------------------------------

@dataclass(frozen=True)
class OrderedPartition:
    """Ordered list of disjoint nonempty blocks (bitmasks) covering the ground set."""

    blocks: tuple[int, ...]
    ground_size: int

    def __post_init__(self):
        seen = 0
        for blk in self.blocks:
            if blk == 0:
                raise InvalidInputError("blocks must be nonempty")
            if blk & seen:
                raise InvalidInputError("blocks must be disjoint")
            if blk >> self.ground_size:
                raise InvalidInputError("block exceeds ground size")
            seen |= blk
        if not self.blocks:
            raise InvalidInputError("an ordered partition has at least one block")

    @classmethod
    def from_lists(cls, blocks, ground_size: int) -> "OrderedPartition":
        return cls(tuple(mask_from_elements(b) for b in blocks), ground_size)

    @property
    def ground(self) -> int:
        out = 0
        for blk in self.blocks:
            out |= blk
        return out

    def __len__(self) -> int:
        return len(self.blocks)

    def as_lists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(mask_elements(b) for b in self.blocks)

    def key(self) -> tuple[int, ...]:
        """Canonical hashable serialization: the block bitmasks in order."""
        return self.blocks


def ordered_partition_blocks(bits: int, t: int) -> list[tuple[int, ...]]:
    """Ordered partitions of a bitmask into t nonempty blocks, as tuples of block masks.

    Order follows the lexicographic order of the corresponding surjections
    (element -> block index) on the increasing element list.
    """
    if t < 1:
        raise InvalidInputError("number of blocks must be at least 1")
    elems = mask_elements(bits)
    rows, _ = surjection_table(len(elems), t) if len(elems) >= t and elems else ((), None)
    out = []
    for v in rows:
        blocks = [0] * t
        for e, i in zip(elems, v):
            blocks[i - 1] |= 1 << (e - 1)
        out.append(tuple(blocks))
    return out


def enumerate_ordered_partitions(x: SubsetMask, t: int) -> list[OrderedPartition]:
    return [OrderedPartition(p, x.ground_size) for p in ordered_partition_blocks(x.bits, t)]


def refinement_leq(q: OrderedPartition, p: OrderedPartition) -> bool:
    """True iff q refines p through an order-preserving surjection of block indices."""
    if q.ground != p.ground or q.ground_size != p.ground_size:
        raise InvalidInputError("ordered partitions over different ground sets")
    j = 0
    for blk in p.blocks:
        acc = 0
        # consecutive q-blocks must exactly tile blk
        while acc != blk:
            if j >= len(q.blocks) or q.blocks[j] & ~blk:
                return False
            acc |= q.blocks[j]
            j += 1
    return j == len(q.blocks)


def binomial(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0
