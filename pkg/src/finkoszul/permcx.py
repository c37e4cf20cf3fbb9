"""The ordered-partition complex and the refinement poset of ordered partitions.

``C_perm(X)`` has in degree ``t`` the ordered partitions of ``X`` into ``t``
blocks (these are the faces of the permutohedron of dimension ``|X| - t``).
The differential is ``sum_{i=1}^t (-1)^i delta^i`` where ``delta^i`` sums
over the ordered splittings of block ``i`` into two nonempty pieces.
"""

from __future__ import annotations

from itertools import permutations

from .chaincx import CochainComplex, cohomology
from .errors import BudgetExceededError, InvalidInputError, ValidationError
from .exactla import SparseIntMatrix
from .fikoszul import UNIT
from .cosimp import DecompositionBasisElt
from .setcomb import (
    OrderedPartition,
    SubsetMask,
    enumerate_ordered_partitions,
    ordered_partition_blocks,
    refinement_leq,
    submasks,
)

DEFAULT_MAX_X = 7


def build_cperm(x: SubsetMask, max_x: int | None = None, check: bool = True) -> CochainComplex:
    """C_perm(X) on degrees 1..|X|; the empty set gives k in degree 0."""
    n = len(x)
    cap = DEFAULT_MAX_X if max_x is None else max_x
    if n > cap:
        raise BudgetExceededError(f"|X| = {n} exceeds the budget {cap}")
    if n == 0:
        return CochainComplex(0, {0: ((),)})
    basis = {t: tuple(ordered_partition_blocks(x.bits, t)) for t in range(1, n + 1)}
    diff = {}
    for t in range(1, n):
        tgt = {p: k for k, p in enumerate(basis[t + 1])}
        entries = {}
        for col, p in enumerate(basis[t]):
            for i in range(1, t + 1):
                sign = -1 if i & 1 else 1
                blk = p[i - 1]
                for left in submasks(blk):
                    right = blk & ~left
                    if left and right:
                        q = p[:i - 1] + (left, right) + p[i:]
                        entries[(tgt[q], col)] = sign
        diff[t] = SparseIntMatrix(len(basis[t + 1]), len(basis[t]), entries)
    return CochainComplex(1, basis, diff, max_degree=n, check=check)


def cohomology_concentration(x: SubsetMask, max_x: int | None = None) -> dict[int, int]:
    """Assert H^t(C_perm(X)) is zero except rank one in degree |X|; return the ranks."""
    c = build_cperm(x, max_x=max_x)
    ranks = cohomology(c).ranks
    n = len(x)
    for t, r in ranks.items():
        expected = 1 if t == n else 0
        if r != expected:
            raise ValidationError(f"H^{t} has rank {r}, expected {expected}", degree=t)
    return ranks


def cperm_as_normalized_label(p: tuple[int, ...]) -> DecompositionBasisElt:
    """Relabel an ordered partition (p_1, ..., p_t) as the normalized element with
    empty carrier and blocks b_{k-1} = p_k."""
    return DecompositionBasisElt(0, tuple(p), UNIT.labels(0)[0])


def codim2_face_count(p: OrderedPartition, r: OrderedPartition) -> int:
    """Number of q with r <= q <= p and |q| = |p| + 1, given r <= p and |r| = |p| + 2."""
    if len(r) != len(p) + 2 or not refinement_leq(r, p):
        raise InvalidInputError("need r <= p with exactly two more blocks")
    ground = SubsetMask(p.ground, p.ground_size)
    return sum(1 for q in enumerate_ordered_partitions(ground, len(p) + 1)
               if refinement_leq(r, q) and refinement_leq(q, p))


def full_flags(x: SubsetMask) -> list[OrderedPartition]:
    """Ordered partitions into singletons (vertices of the permutohedron)."""
    return [OrderedPartition.from_lists([[e] for e in perm], x.ground_size)
            for perm in permutations(x.elements())]


def share_upper_bound(q: OrderedPartition, r: OrderedPartition) -> bool:
    """Whether two full ordered partitions lie below a common partition into |X|-1 blocks."""
    ground = SubsetMask(q.ground, q.ground_size)
    n = len(ground)
    if n < 2:
        return False
    return any(refinement_leq(q, p) and refinement_leq(r, p)
               for p in enumerate_ordered_partitions(ground, n - 1))


def differ_by_adjacent_transposition(q: OrderedPartition, r: OrderedPartition) -> bool:
    a, b = q.blocks, r.blocks
    diffs = [i for i in range(len(a)) if a[i] != b[i]]
    return (len(diffs) == 2 and diffs[1] == diffs[0] + 1
            and a[diffs[0]] == b[diffs[1]] and a[diffs[1]] == b[diffs[0]])
