"""Command-line front end.

Every command builds a report dictionary with a fixed layout (schema
``finkoszul.report/1``) and renders it as a text table, JSON or CSV.
Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
3 size budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .chaincx import cohomology
from .checks import SUITES, plan_suite, run_checks
from .cosimp import verify_norm_vs_kz
from .errors import BudgetExceededError, FinKoszulError, InvalidInputError
from .fikoszul import CONSTANT, UNIT, build_C, default_budget, hom_module
from .permcx import DEFAULT_MAX_X, build_cperm
from .repchar import (
    decompose_irreducible,
    kernel_character_oracle,
    top_degree_character,
    virtual_character_H0,
)
from .rkfun import rk_recursive, rk_table
from .setcomb import SubsetMask, count_surjections, stirling2, surjection_table

SCHEMA = "finkoszul.report/1"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
RK_TABLE_MAX_B = 40
DEFAULT_KERNEL_MAX_B = 7
CACHE_ENV = "FINKOSZUL_CACHE_DIR"


# -- cache ----------------------------------------------------------------------

def code_version() -> str:
    """Hash of the package version and source files."""
    h = hashlib.sha256(__version__.encode())
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:16]


def _cache_file(kind: str, params: dict) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = json.dumps({"kind": kind, "params": params, "code": code_version()}, sort_keys=True)
    digest = hashlib.sha256(key.encode()).hexdigest()[:24]
    return Path(root) / f"{kind}-{digest}.json"


def cache_load(kind: str, params: dict):
    path = _cache_file(kind, params)
    if path is None or not path.exists():
        return None
    try:
        return json.loads(path.read_text())
    except (OSError, ValueError):
        return None


def cache_store(kind: str, params: dict, value) -> None:
    """Write-once store; an existing entry is never overwritten."""
    path = _cache_file(kind, params)
    if path is None or path.exists():
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".{os.getpid()}.tmp")
    tmp.write_text(json.dumps(value))
    try:
        os.link(tmp, path)
    except FileExistsError:
        pass
    finally:
        tmp.unlink()


# -- report helpers -------------------------------------------------------------

def _str_keys(d: dict) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


def make_report(command: str, parameters: dict, results: dict, checks: list[dict]) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "parameters": parameters,
        "results": results,
        "checks": checks,
        "status": "pass" if all(c["passed"] for c in checks) else "fail",
    }


def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(h) for h in headers]] + [["-" if v is None else str(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _render_checks(checks: list[dict]) -> str:
    if not checks:
        return ""
    n_pass = sum(c["passed"] for c in checks)
    lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}" for c in checks]
    lines.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(lines)


def _character_rows(chi_json: dict) -> list[list]:
    return [[" x ".join(str(tuple(p)) for p in key), v] for key, v in chi_json["values"]]


# -- commands -------------------------------------------------------------------

def cmd_rk_table(args) -> tuple[dict, str, list[list] | None]:
    if args.max_b < 0:
        raise InvalidInputError("--max-b must be non-negative")
    kernel = not args.no_kernel
    if args.max_b > RK_TABLE_MAX_B or (kernel and args.max_b > args.kernel_max_b):
        raise BudgetExceededError(
            f"max_b = {args.max_b} exceeds the budget "
            f"({args.kernel_max_b} with the kernel method, {RK_TABLE_MAX_B} without)")
    params = {"max_b": args.max_b, "kernel": kernel}
    cells = cache_load("rk-table", params)
    if cells is None:
        table = rk_table(args.max_b, kernel=kernel, kernel_max_b=args.kernel_max_b)
        cells = [{"b": c.b, "a": c.a, "value": c.value, "methods": c.methods, "agree": c.agree}
                 for c in sorted(table.cells.values(), key=lambda c: (c.a, c.b))]
        cache_store("rk-table", params, cells)
    values = {(c["b"], c["a"]): c["value"] for c in cells}
    rows = [[a] + [values.get((b, a)) for b in range(args.max_b + 1)] for a in range(args.max_b + 1)]
    results = {"rows": [{"a": r[0], "values": r[1:]} for r in rows], "cells": cells}
    checks = [_check(f"rk_methods_agree[b={c['b']},a={c['a']}]", c["agree"], methods=c["methods"])
              for c in cells]
    report = make_report("rk-table", params, results, checks)
    headers = ["a\\b"] + [str(b) for b in range(args.max_b + 1)]
    text = _table(headers, rows)
    bad = [c for c in checks if not c["passed"]]
    text += "\n" + (f"all {len(checks)} cells agree across methods" if not bad
                    else _render_checks(bad))
    return report, text, [headers] + rows


def cmd_cohomology(args):
    b, a = args.b, args.a
    if b < 0 or a < 0:
        raise InvalidInputError("b and a must be non-negative")
    max_b = args.max_b if args.max_b is not None else default_budget(a)
    c = build_C(b, a, max_b=max_b)
    rep = cohomology(c, snf=args.snf)
    ranks = rep.nonzero()
    results = {
        "dims": _str_keys(rep.dims),
        "fi_op_cohomology": _str_keys(ranks),
        "hom_rank": ranks.get(0, 0),
        "ext1_rank": ranks.get(1, 0),
        "euler_characteristic": rep.euler,
    }
    checks = [_check("d_squared_zero", True)]
    if b >= a:
        checks.append(_check("h0_equals_rk", ranks.get(0, 0) == rk_recursive(b, a),
                             h0=ranks.get(0, 0), rk=rk_recursive(b, a)))
    if b > a >= 1:
        others = {t: r for t, r in ranks.items() if t not in (0, b - a)}
        checks.append(_check("cohomology_concentration", not others and ranks.get(b - a) == 1,
                             unexpected=_str_keys(others)))
    if args.snf:
        results["snf_all_ones"] = _str_keys(rep.all_ones)
        checks.append(_check("snf_all_ones", all(rep.all_ones.values())))
    if args.characters and b > a >= 1:
        chi = virtual_character_H0(b, a)
        results["h0_character"] = chi.to_json()
        results["h0_decomposition"] = _decomposition_json(decompose_irreducible(chi))
        results["top_degree_character"] = top_degree_character(b, a).to_json()
    report = make_report("cohomology", {"b": b, "a": a, "snf": args.snf,
                                        "characters": args.characters}, results, checks)
    lines = [f"C({b},{a}): " + ("empty complex" if c.is_empty() else
                                "dims " + ", ".join(f"{t}:{d}" for t, d in sorted(rep.dims.items())))]
    lines.append(_table(["degree", "rank H"], [[t, r] for t, r in sorted(ranks.items())]))
    lines.append(f"Hom rank (H^0) = {results['hom_rank']}, Ext^1 rank (H^1) = {results['ext1_rank']}")
    if args.snf:
        lines.append("Smith invariant factors all 1: " + str(all(rep.all_ones.values())))
    if "h0_decomposition" in results:
        lines.append("H^0 character, irreducible decomposition:")
        lines.append(_table(["S_a", "S_b", "mult"], [[str(tuple(d[0])), str(tuple(d[1])), d[2]]
                                                    for d in results["h0_decomposition"]]))
    lines.append(_render_checks(checks))
    return report, "\n".join(lines), None


def _decomposition_json(dec) -> list:
    return [[list(l) for l in d[:-1]] + [d[-1] if isinstance(d[-1], int) else str(d[-1])] for d in dec]


def cmd_character(args):
    b, a = args.b, args.a
    if not b > a >= 1:
        raise InvalidInputError("character needs b > a >= 1")
    if b > args.max_b:
        raise BudgetExceededError(f"b = {b} exceeds the size budget {args.max_b}")
    chi = virtual_character_H0(b, a)
    results = {"h0_character": chi.to_json(),
               "h0_decomposition": _decomposition_json(decompose_irreducible(chi))}
    checks = [_check("h0_dimension_equals_rk", chi.identity_value() == rk_recursive(b, a),
                     dimension=chi.identity_value())]
    if args.oracle:
        checks.append(_check("h0_character_matches_kernel_traces",
                             chi == kernel_character_oracle(b, a, max_b=args.max_b)))
    report = make_report("character", {"b": b, "a": a, "oracle": args.oracle}, results, checks)
    text = "\n".join([_table(["class (S_a x S_b)", "value"], _character_rows(results["h0_character"])),
                      _render_checks(checks)])
    csv_rows = [["class", "value"]] + _character_rows(results["h0_character"])
    return report, text, csv_rows


def cmd_perm_complex(args):
    n = args.n
    if n < 0:
        raise InvalidInputError("n must be non-negative")
    c = build_cperm(SubsetMask.full(n), max_x=args.max_x)
    rep = cohomology(c)
    ranks = rep.nonzero()
    expected = {n: 1} if n else {0: 1}
    checks = [_check("cohomology_concentration", ranks == expected, ranks=_str_keys(ranks))]
    results = {"dims": _str_keys(rep.dims), "cohomology": _str_keys(ranks)}
    report = make_report("perm-complex", {"n": n}, results, checks)
    rows = [[t, rep.dims[t], rep.ranks.get(t, 0)] for t in sorted(rep.dims)]
    text = _table(["degree", "dim", "rank H"], rows) + "\n" + _render_checks(checks)
    return report, text, [["degree", "dim", "rank_H"]] + rows


def cmd_normalized(args):
    if args.module == "hom":
        if args.a is None:
            raise InvalidInputError("--module hom needs -a")
        module = hom_module(args.a)
    else:
        module = UNIT if args.module == "unit" else CONSTANT
    rep = verify_norm_vs_kz(module, args.b, max_b=args.max_b)
    checks = [_check("projection_surjective", rep["surjective"]),
              _check("projection_quasi_isomorphism", rep["quasi_isomorphism"],
                     failed_degrees=rep["failed_degrees"])]
    results = {"normalized_dims": _str_keys(rep["normalized_dims"]),
               "koszul_dims": _str_keys(rep["koszul_dims"]),
               "fi_op_cohomology": _str_keys(rep["fi_op_cohomology"])}
    report = make_report("normalized", {"module": rep["module"], "b": args.b}, results, checks)
    degrees = sorted(set(rep["normalized_dims"]) | set(rep["koszul_dims"]))
    rows = [[t, rep["normalized_dims"].get(t, 0), rep["koszul_dims"].get(t, 0),
             rep["fi_op_cohomology"].get(t, 0)] for t in degrees]
    text = (f"module {rep['module']}, b = {args.b}\n"
            + _table(["degree", "dim N", "dim Kz", "rank H"], rows) + "\n" + _render_checks(checks))
    return report, text, [["degree", "dim_N", "dim_Kz", "rank_H"]] + rows


def cmd_surj_count(args):
    b, a = args.b, args.a
    if b < 0 or a < 0:
        raise InvalidInputError("b and a must be non-negative")
    count = count_surjections(b, a)
    results = {"count": count, "stirling2": stirling2(b, a)}
    checks = []
    if args.list:
        if b > args.max_b:
            raise BudgetExceededError(f"listing needs b <= {args.max_b}")
        params = {"b": b, "a": a}
        rows = cache_load("surjections", params)
        if rows is None:
            rows = [list(v) for v in surjection_table(b, a)[0]]
            cache_store("surjections", params, rows)
        results["surjections"] = rows
        checks.append(_check("enumeration_matches_count", len(rows) == count, listed=len(rows)))
    report = make_report("surj-count", {"b": b, "a": a, "list": args.list}, results, checks)
    text = f"surjections {b} ->> {a}: {count} (= {a}! * S({b},{a}))"
    if args.list:
        text += "\n" + "\n".join(" ".join(map(str, r)) for r in results["surjections"])
        text += "\n" + _render_checks(checks)
    csv_rows = [["b", "a", "count"], [b, a, count]]
    return report, text, csv_rows


def cmd_verify(args):
    plan = plan_suite(args.suite, max_b=args.max_b, max_x=args.max_x,
                      snf_limit=args.snf_limit, fault=args.inject_fault)
    results = run_checks(plan, jobs=args.jobs)
    checks = [{"name": r.name, "suite": r.suite, "passed": r.passed, "detail": r.detail} for r in results]
    params = {"suite": args.suite, "max_b": args.max_b, "max_x": args.max_x,
              "snf_limit": args.snf_limit, "inject_fault": args.inject_fault}
    report = make_report("verify", params, {"total": len(checks),
                                            "passed": sum(c["passed"] for c in checks)}, checks)
    rows = [[c["suite"], c["name"], "pass" if c["passed"] else "FAIL"] for c in checks]
    return report, _render_checks(checks), [["suite", "check", "status"]] + rows


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finkoszul",
                                description="Exact computations with Koszul complexes of FI^op-modules.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit the JSON report")
    fmt.add_argument("--csv", action="store_true", help="emit tabular results as CSV")
    common.add_argument("--timing", action="store_true",
                        help="add wall-clock timing to the report (breaks byte-identity)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rk-table", parents=[common], help="triangular table of Rk(b, a)")
    s.add_argument("--max-b", type=int, default=7)
    s.add_argument("--no-kernel", action="store_true", help="skip the kernel-rank method")
    s.add_argument("--kernel-max-b", type=int, default=DEFAULT_KERNEL_MAX_B)
    s.set_defaults(func=cmd_rk_table)

    s = sub.add_parser("cohomology", parents=[common], help="cohomology of C(b, a)")
    s.add_argument("b", type=int)
    s.add_argument("a", type=int)
    s.add_argument("--snf", action="store_true", help="Smith normal form of each differential")
    s.add_argument("--characters", action="store_true", help="symmetric-group characters")
    s.add_argument("--max-b", type=int, default=None)
    s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=SUITES + ("all",))
    s.add_argument("--max-b", type=int, default=6, help="largest b for complexes C(b, a)")
    s.add_argument("--max-x", type=int, default=6, help="largest set for the ordered-partition complex")
    s.add_argument("--snf-limit", type=int, default=5, help="largest b with Smith normal forms")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--inject-fault", action="store_true",
                   help="corrupt one differential entry (negative control)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("character", parents=[common], help="character of H^0 of C(b, a)")
    s.add_argument("b", type=int)
    s.add_argument("a", type=int)
    s.add_argument("--oracle", action="store_true", help="compare with explicit kernel traces")
    s.add_argument("--max-b", type=int, default=6)
    s.set_defaults(func=cmd_character)

    s = sub.add_parser("perm-complex", parents=[common], help="ordered-partition complex of an n-set")
    s.add_argument("n", type=int)
    s.add_argument("--max-x", type=int, default=DEFAULT_MAX_X)
    s.set_defaults(func=cmd_perm_complex)

    s = sub.add_parser("normalized", parents=[common], help="normalized complex versus Koszul complex")
    s.add_argument("b", type=int)
    s.add_argument("--module", choices=("unit", "constant", "hom"), default="constant")
    s.add_argument("-a", type=int, default=None, help="target size for --module hom")
    s.add_argument("--max-b", type=int, default=6)
    s.set_defaults(func=cmd_normalized)

    s = sub.add_parser("surj-count", parents=[common], help="count (and list) surjections b ->> a")
    s.add_argument("b", type=int)
    s.add_argument("a", type=int)
    s.add_argument("--list", action="store_true")
    s.add_argument("--max-b", type=int, default=8)
    s.set_defaults(func=cmd_surj_count)
    return p


def _write_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([["" if v is None else v for v in r] for r in rows])
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    start = time.perf_counter()
    try:
        report, text, csv_rows = args.func(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FinKoszulError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    elif args.csv:
        if csv_rows is None:
            print("this command has no tabular output; use --json", file=sys.stderr)
            return EXIT_USAGE
        sys.stdout.write(_write_csv(csv_rows))
    else:
        print(text)
        if args.timing:
            print(f"time: {report['timing']['seconds']} s")
    return EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
