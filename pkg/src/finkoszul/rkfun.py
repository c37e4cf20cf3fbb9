"""The rank function Rk(b, a) by three independent routes.

* ``rk_euler``: Euler characteristic of C(b, a) corrected by the rank-one
  top cohomology (valid for b > a > 0);
* ``rk_recursive``: boundary values plus the two-term recursion;
* ``rk_kernel``: kernel dimension of the restriction map R_{b,a}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from .errors import BudgetExceededError, InvalidInputError
from .exactla import rank_exact
from .fikoszul import restriction_map
from .setcomb import binomial, count_surjections

DEFAULT_MAX_B = 7


def rk_euler(b: int, a: int) -> int:
    """sum_{t=0}^{b-a} (-1)^t C(b,t) |hom(b-t, a)| - (-1)^{b-a}, for b > a > 0."""
    if not b > a > 0:
        raise InvalidInputError("the Euler route needs b > a > 0")
    chi = sum((-1) ** t * binomial(b, t) * count_surjections(b - t, a) for t in range(b - a + 1))
    return chi - (-1) ** (b - a)


@lru_cache(maxsize=None)
def rk_recursive(b: int, a: int) -> int:
    if b < 0 or a < 0:
        raise InvalidInputError("sizes must be non-negative")
    if a == 0:
        return 1 if b == 0 else 0
    if b < a:
        return 0
    if b == a:
        return factorial(a)
    if a == 1:
        return 0
    if b == a + 1:
        return (a - 2) * factorial(a + 1) // 2 + 1
    return a * rk_recursive(b - 1, a - 1) + (a - 1) * rk_recursive(b - 1, a)


def rk_kernel(b: int, a: int, max_b: int | None = None) -> int:
    """dim ker R_{b,a} (for a = 0 or b = 0 this is the size of the empty-target case)."""
    if b < 0 or a < 0:
        raise InvalidInputError("sizes must be non-negative")
    cap = DEFAULT_MAX_B if max_b is None else max_b
    if b > cap:
        raise BudgetExceededError(f"b = {b} exceeds the kernel-route budget {cap}")
    r = restriction_map(b, a)
    return r.cols - rank_exact(r)


def rk_closed_form(b: int, a: int):
    """Closed forms where known, else None."""
    if a == 0:
        return 1 if b == 0 else 0
    if b < a:
        return 0
    if b == a:
        return factorial(a)
    if a == 1:
        return 0
    if a == 2:
        return 1
    if a == 3:
        return 2 ** b - 3
    if b == a + 1:
        return (a - 2) * factorial(a + 1) // 2 + 1
    return None


@dataclass
class RkCell:
    b: int
    a: int
    value: int
    methods: dict[str, int] = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return len(set(self.methods.values())) <= 1


@dataclass
class RkTable:
    max_b: int
    cells: dict[tuple[int, int], RkCell]

    def row(self, a: int) -> list:
        return [self.cells[(b, a)].value if (b, a) in self.cells else None
                for b in range(self.max_b + 1)]

    @property
    def all_agree(self) -> bool:
        return all(c.agree for c in self.cells.values())


def rk_cell(b: int, a: int, kernel: bool = True, max_b: int | None = None) -> RkCell:
    methods = {"recursive": rk_recursive(b, a)}
    if b > a > 0:
        methods["euler"] = rk_euler(b, a)
    if kernel:
        methods["kernel"] = rk_kernel(b, a, max_b=max_b)
    closed = rk_closed_form(b, a)
    if closed is not None:
        methods["closed_form"] = closed
    return RkCell(b, a, methods["recursive"], methods)


def rk_table(max_b: int, kernel: bool = True, kernel_max_b: int | None = None) -> RkTable:
    """All cells 0 <= a <= b <= max_b with every applicable method."""
    cells = {}
    for b in range(max_b + 1):
        for a in range(b + 1):
            cells[(b, a)] = rk_cell(b, a, kernel=kernel, max_b=kernel_max_b if kernel_max_b else max(max_b, DEFAULT_MAX_B))
    return RkTable(max_b, cells)
