"""Verification suites driven by the ``verify`` command.

Each check is a module-level function returning ``(passed, detail)`` so
that checks can be shipped to worker processes.  ``plan_suite`` lists the
checks of a suite for given budgets; ``run_checks`` executes them and
returns results in plan order regardless of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import factorial

from .chaincx import (
    ChainMap,
    cohomology,
    induced_rank,
    quasi_iso_check,
    shift,
    validate,
    verify_ses,
)
from .cosimp import (
    build_normalized,
    codegeneracy,
    coface,
    coface_from_comonad,
    cosimplicial_basis,
    verify_norm_vs_kz,
)
from .errors import FinKoszulError
from .exactla import SparseIntMatrix, multiply
from .fikoszul import (
    CONSTANT,
    UNIT,
    build_C,
    build_kz,
    build_subcomplex,
    c_y_to_smaller_label,
    check_null_homotopy,
    d_to_shifted_label,
    hom_module,
    is_equivariant,
    matrix_isomorphism,
    null_homotopy_constant,
    ses_maps,
    top_degree_projection,
)
from .permcx import (
    build_cperm,
    codim2_face_count,
    cohomology_concentration,
    cperm_as_normalized_label,
)
from .repchar import (
    kernel_character_oracle,
    outer_product,
    sign_character,
    top_degree_character,
    virtual_character_H0,
)
from .rkfun import rk_cell, rk_recursive
from .setcomb import OrderedPartition, SubsetMask, enumerate_ordered_partitions, refinement_leq

SUITES = ("koszul", "subcomplex", "cosimp", "perm", "char")
CHARACTER_PAIRS = ((3, 2), (4, 2), (4, 3), (5, 3))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    func: str
    args: tuple


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: dict

    def to_json(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


def _module(name: str, a: int = 0):
    return {"unit": UNIT, "constant": CONSTANT}.get(name) or hom_module(a)


def _corrupt(c):
    """Flip the sign of one differential entry (negative control)."""
    t = max(t for t in c.diff if not c.diff[t].is_zero())
    (i, j), v = next(c.diff[t].entries())
    entries = dict(c.diff[t].entries())
    entries[(i, j)] = -v
    c.diff[t] = SparseIntMatrix(c.diff[t].rows, c.diff[t].cols, entries)
    return c


# -- koszul -------------------------------------------------------------------

def check_rk_cell(b, a):
    cell = rk_cell(b, a)
    return cell.agree, {"b": b, "a": a, "methods": cell.methods}


def check_cohomology_concentration(b, a, snf, fault=False):
    c = build_C(b, a, max_b=b)
    if fault:
        _corrupt(c)
    validate(c)
    rep = cohomology(c, snf=snf)
    ranks = rep.nonzero()
    expected = {0: rk_recursive(b, a)} if rk_recursive(b, a) else {}
    expected[b - a] = expected.get(b - a, 0) + 1
    ok = ranks == expected and rep.euler == sum((-1) ** t * r for t, r in rep.ranks.items())
    detail = {"b": b, "a": a, "ranks": _str_keys(ranks), "expected": _str_keys(expected)}
    if snf:
        detail["snf_all_ones"] = all(rep.all_ones.values())
        ok = ok and detail["snf_all_ones"]
    return ok, detail


def check_ext1(b, a):
    h1 = cohomology(build_C(b, a, max_b=b)).ranks.get(1, 0)
    expected = 1 if b == a + 1 else 0
    return h1 == expected, {"b": b, "a": a, "H1": h1, "expected": expected}


def check_dimension_anchor(a):
    c = build_C(a + 1, a, max_b=a + 1, check=False)
    d0, d1 = c.dim(0), c.dim(1)
    ok = 2 * d0 == a * factorial(a + 1) and d1 == factorial(a + 1)
    return ok, {"a": a, "dims": [d0, d1]}


def check_constant_null_homotopy(b):
    c = build_kz(CONSTANT, b, max_b=b)
    flags = check_null_homotopy(c, null_homotopy_constant(b))
    return all(flags.values()), {"b": b, "degrees": len(flags)}


def check_top_degree(b, a):
    f = top_degree_projection(b, a)
    t = b - a
    r = induced_rank(f, t)
    return r == 1, {"b": b, "a": a, "degree": t, "induced_rank": r}


def check_equivariance(b, a):
    c = build_C(b, a, max_b=b)
    ident_a = tuple(range(1, a + 1))
    ok = True
    for i in range(1, b):
        pi = list(range(1, b + 1))
        pi[i - 1], pi[i] = pi[i], pi[i - 1]
        ok = ok and is_equivariant(c, ident_a, tuple(pi), b)
    for i in range(1, a):
        sigma = list(ident_a)
        sigma[i - 1], sigma[i] = sigma[i], sigma[i - 1]
        ok = ok and is_equivariant(c, tuple(sigma), tuple(range(1, b + 1)), b)
    return ok, {"b": b, "a": a}


# -- subcomplex ---------------------------------------------------------------

def check_subcomplex_identifications(b, a):
    parent = build_C(b, a, max_b=b)
    detail = {"b": b, "a": a}
    for y in range(1, a):
        f, g = ses_maps(b, a, y, parent)
        verify_ses(f, g)
    detail["ses"] = a - 1
    d_cx, _ = build_subcomplex(b, a, "D", parent=parent)
    iso_d = matrix_isomorphism(d_cx, shift(build_C(b - 1, a, max_b=b), 1), d_to_shifted_label)
    iso_c = qi = True
    for y in range(1, a + 1):
        c_y, _ = build_subcomplex(b, a, "C_y", y, parent)
        ct, _ = build_subcomplex(b, a, "Ctilde_y", y, parent)
        iso_c = iso_c and matrix_isomorphism(c_y, build_C(b - 1, a - 1, max_b=b), c_y_to_smaller_label(y))
        incl = {t: SparseIntMatrix(ct.dim(t), c_y.dim(t),
                                   {(ct.index(t)[e], k): 1 for k, e in enumerate(c_y.basis[t])})
                for t in parent.degrees()}
        qi = qi and quasi_iso_check(ChainMap(c_y, ct, incl)).ok
    whole, _ = build_subcomplex(b, a, "filt_y", a, parent)
    detail.update(iso_D=iso_d, iso_C_y=iso_c, quasi_iso=qi, filt_top_is_whole=whole.dims() == parent.dims())
    return iso_d and iso_c and qi and detail["filt_top_is_whole"], detail


# -- cosimp -------------------------------------------------------------------

def check_norm_vs_kz(module, a, b):
    rep = verify_norm_vs_kz(_module(module, a), b, max_b=b)
    ok = rep["surjective"] and rep["quasi_isomorphism"]
    return ok, {"module": rep["module"], "b": b, "fi_op_cohomology": _str_keys(rep["fi_op_cohomology"])}


def check_cosimplicial_structure(module, a, b):
    """Cofaces agree with the comonad route, cosimplicial identities hold,
    and the normalized part is the joint kernel of the codegeneracies."""
    f = _module(module, a)
    ok = True
    for ell in range(0, 3):
        for i in range(ell + 2):
            ok = ok and coface(f, b, ell, i) == coface_from_comonad(f, b, ell, i)
        # d^j d^i = d^i d^{j-1} for i < j
        for j in range(ell + 2 + 1):
            for i in range(j):
                lhs = multiply(coface(f, b, ell + 1, j), coface(f, b, ell, i))
                rhs = multiply(coface(f, b, ell + 1, i), coface(f, b, ell, j - 1))
                ok = ok and lhs == rhs
        # s^j d^i relations, s^j : ell+1 -> ell
        for j in range(ell + 1):
            for i in range(ell + 2):
                lhs = multiply(codegeneracy(f, b, ell, j), coface(f, b, ell, i))
                if i < j:
                    rhs = multiply(coface(f, b, ell - 1, i), codegeneracy(f, b, ell - 1, j - 1))
                elif i in (j, j + 1):
                    rhs = SparseIntMatrix.identity(lhs.rows)
                else:
                    rhs = multiply(coface(f, b, ell - 1, i - 1), codegeneracy(f, b, ell - 1, j))
                ok = ok and lhs == rhs
        # joint kernel of the codegeneracies on ell+1 blocks
        basis = cosimplicial_basis(f, b, ell + 1)
        degenerate = set()
        for j in range(ell + 1):
            for col in codegeneracy(f, b, ell, j).columns():
                degenerate.add(col)
        nondeg = tuple(e for k, e in enumerate(basis) if k not in degenerate)
        ok = ok and nondeg == tuple(e for e in basis if all(e.blocks))
    # normalized differential = restriction of the alternating coface sum
    n = build_normalized(f, b, max_b=b)
    for t in range(min(b, 3)):
        full = None
        for i in range(t + 2):
            m = coface(f, b, t, i).scale((-1) ** i)
            full = m if full is None else full + m
        src = cosimplicial_basis(f, b, t)
        tgt = cosimplicial_basis(f, b, t + 1)
        cols = [src.index(e) for e in n.basis[t]]
        restricted = full.select(None, cols)
        keep = [k for k, e in enumerate(tgt) if all(e.blocks)]
        drop = [k for k, e in enumerate(tgt) if not all(e.blocks)]
        ok = ok and restricted.select(drop, None).is_zero() and restricted.select(keep, None) == n.d(t)
    return ok, {"module": f.name, "b": b}


# -- perm ---------------------------------------------------------------------

def check_cperm_concentration(n):
    ranks = cohomology_concentration(SubsetMask.full(n), max_x=n)
    return True, {"size": n, "top_rank": ranks[n]}


def check_cperm_vs_normalized(n):
    c = build_cperm(SubsetMask.full(n), max_x=n)
    nc = build_normalized(UNIT, n, max_b=n)
    ok = all(tuple(cperm_as_normalized_label(p) for p in c.basis.get(t, ())) == nc.basis[t]
             for t in range(1, n + 1)) and nc.dim(0) == 0
    ok = ok and all(c.d(t) == nc.d(t) for t in range(1, n))
    return ok, {"size": n}


def check_codim2(n):
    x = SubsetMask.full(n)
    counts = set()
    pairs = 0
    for k in range(1, n - 1):
        for p in enumerate_ordered_partitions(x, k):
            for r in enumerate_ordered_partitions(x, k + 2):
                if refinement_leq(r, p):
                    counts.add(codim2_face_count(p, r))
                    pairs += 1
    return counts <= {2}, {"size": n, "pairs": pairs, "counts": sorted(counts)}


# -- char ---------------------------------------------------------------------

def check_character_identity(b, a):
    v = virtual_character_H0(b, a)
    k = kernel_character_oracle(b, a, max_b=b)
    ok = v == k and v.identity_value() == rk_recursive(b, a)
    return ok, {"b": b, "a": a, "classes": len(v.values), "dimension": v.identity_value()}


def check_sign_restriction():
    chi = virtual_character_H0(3, 2).restrict_to_factor(0)
    return chi == sign_character(2), {"values": {str(list(k[0])): v for k, v in chi.values.items()}}


def check_top_character(b, a):
    chi = top_degree_character(b, a)
    return chi == outer_product(sign_character(a), sign_character(b)), {"b": b, "a": a}


CHECK_FUNCTIONS = {f.__name__: f for f in (
    check_rk_cell, check_cohomology_concentration, check_ext1, check_dimension_anchor,
    check_constant_null_homotopy, check_top_degree, check_equivariance, check_subcomplex_identifications,
    check_norm_vs_kz, check_cosimplicial_structure, check_cperm_concentration,
    check_cperm_vs_normalized, check_codim2, check_character_identity,
    check_sign_restriction, check_top_character)}


def _str_keys(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def plan_suite(suite: str, max_b: int = 6, max_x: int = 6, snf_limit: int = 5,
               fault: bool = False) -> list[Check]:
    if suite == "all":
        return [c for s in SUITES for c in plan_suite(s, max_b, max_x, snf_limit, fault)]
    out = []

    def add(name, func, *args):
        out.append(Check(suite, name, func, args))

    if suite == "koszul":
        for b in range(max_b + 1):
            for a in range(b + 1):
                add(f"rk_methods_agree[b={b},a={a}]", "check_rk_cell", b, a)
        for b in range(2, max_b + 1):
            for a in range(1, b):
                add(f"cohomology_concentration[b={b},a={a}]", "check_cohomology_concentration",
                    b, a, b <= snf_limit, fault)
                add(f"ext1_readout[b={b},a={a}]", "check_ext1", b, a)
                add(f"top_degree_projection[b={b},a={a}]", "check_top_degree", b, a)
                if b <= 5:
                    add(f"equivariance[b={b},a={a}]", "check_equivariance", b, a)
        for a in range(0, max_b + 1):
            add(f"dimension_anchor[a={a}]", "check_dimension_anchor", a)
        for b in range(1, max_b + 1):
            add(f"constant_null_homotopy[b={b}]", "check_constant_null_homotopy", b)
    elif suite == "subcomplex":
        for b in range(2, min(max_b, 6) + 1):
            for a in range(1, b):
                add(f"subcomplex_identifications[b={b},a={a}]", "check_subcomplex_identifications", b, a)
    elif suite == "cosimp":
        mods = [("unit", 0), ("constant", 0), ("hom", 1), ("hom", 2), ("hom", 3)]
        for module, a in mods:
            label = module if module != "hom" else f"hom{a}"
            for b in range(0, min(max_b, 5) + 1):
                add(f"normalized_quasi_iso[{label},b={b}]", "check_norm_vs_kz", module, a, b)
            for b in range(0, min(max_b, 3) + 1):
                add(f"cosimplicial_structure[{label},b={b}]", "check_cosimplicial_structure", module, a, b)
    elif suite == "perm":
        for n in range(1, max_x + 1):
            add(f"cperm_concentration[n={n}]", "check_cperm_concentration", n)
        for n in range(1, min(max_x, 5) + 1):
            add(f"cperm_matches_normalized[n={n}]", "check_cperm_vs_normalized", n)
            add(f"codim2_two_intermediates[n={n}]", "check_codim2", n)
    elif suite == "char":
        for b, a in CHARACTER_PAIRS:
            if b <= max_b:
                add(f"h0_character_identity[b={b},a={a}]", "check_character_identity", b, a)
        if max_b >= 3:
            add("h0_sign_restriction[b=3,a=2]", "check_sign_restriction")
        for b, a in ((3, 2), (4, 3)):
            if b <= max_b:
                add(f"top_degree_character[b={b},a={a}]", "check_top_character", b, a)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return out


def run_check(check: Check) -> CheckResult:
    try:
        passed, detail = CHECK_FUNCTIONS[check.func](*check.args)
    except FinKoszulError as exc:
        passed, detail = False, {"error": type(exc).__name__, "message": str(exc),
                                 "degree": getattr(exc, "degree", None)}
    return CheckResult(check.suite, check.name, bool(passed), detail)


def run_checks(checks: list[Check], jobs: int = 1) -> list[CheckResult]:
    if jobs <= 1 or len(checks) < 2:
        return [run_check(c) for c in checks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_check, checks))
