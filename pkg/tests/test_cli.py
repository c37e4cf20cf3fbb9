import csv
import io
import json
import subprocess
import sys

import pytest

from finkoszul.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_rk_table_rows(capsys):
    code, rep = run_json(capsys, "rk-table", "--max-b", "5")
    assert code == 0 and rep["schema"] == SCHEMA and rep["status"] == "pass"
    rows = {r["a"]: r["values"] for r in rep["results"]["rows"]}
    assert rows[3] == [None, None, None, 6, 13, 29]
    cells = {(c["b"], c["a"]): c["value"] for c in rep["results"]["cells"]}
    assert cells[(2, 1)] == 0 and cells[(0, 0)] == 1
    assert "timing" not in rep


def test_rk_table_csv(capsys):
    code, out, _ = run(capsys, "rk-table", "--max-b", "3", "--csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["a\\b", "0", "1", "2", "3"]
    assert rows[3] == ["2", "", "", "2", "1"]


def test_rk_table_budget(capsys):
    code, _, err = run(capsys, "rk-table", "--max-b", "9")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "rk-table", "--max-b", "12", "--no-kernel")
    assert code == 0


@pytest.mark.parametrize("b,a,expected", [(4, 3, {"0": 13, "1": 1}), (4, 2, {"0": 1, "2": 1}),
                                          (2, 3, {})])
def test_cohomology(capsys, b, a, expected):
    code, rep = run_json(capsys, "cohomology", str(b), str(a))
    assert code == 0
    assert rep["results"]["fi_op_cohomology"] == expected
    assert rep["results"]["hom_rank"] == expected.get("0", 0)
    assert rep["results"]["ext1_rank"] == expected.get("1", 0)


def test_cohomology_snf_and_characters(capsys):
    code, rep = run_json(capsys, "cohomology", "3", "2", "--snf", "--characters")
    assert code == 0
    assert all(rep["results"]["snf_all_ones"].values())
    assert rep["results"]["h0_decomposition"] == [[[1, 1], [3], 1]]


def test_cohomology_text(capsys):
    code, out, _ = run(capsys, "cohomology", "4", "3")
    assert code == 0 and "Hom rank (H^0) = 13" in out and "Ext^1 rank (H^1) = 1" in out


def test_usage_errors(capsys):
    assert run(capsys, "cohomology", "-1", "2")[0] == 2
    assert run(capsys, "character", "2", "2")[0] == 2
    assert run(capsys, "normalized", "3", "--module", "hom")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "koszul", "--jobs", "0"])
    assert exc.value.code == 2


def test_budget_exit_code(capsys):
    assert run(capsys, "cohomology", "9", "3")[0] == 3
    assert run(capsys, "perm-complex", "9")[0] == 3
    assert run(capsys, "surj-count", "10", "3", "--list")[0] == 3


def test_character(capsys):
    code, rep = run_json(capsys, "character", "3", "2", "--oracle")
    assert code == 0 and all(c["passed"] for c in rep["checks"])
    code, out, _ = run(capsys, "character", "3", "2", "--csv")
    assert out.splitlines()[0] == "class,value"


def test_perm_complex(capsys):
    code, rep = run_json(capsys, "perm-complex", "4")
    assert code == 0
    assert rep["results"]["dims"] == {"1": 1, "2": 14, "3": 36, "4": 24}
    assert rep["results"]["cohomology"] == {"4": 1}


def test_normalized(capsys):
    code, rep = run_json(capsys, "normalized", "3", "--module", "hom", "-a", "2")
    assert code == 0 and rep["results"]["fi_op_cohomology"] == {"0": 1, "1": 1}


def test_surj_count(capsys):
    code, rep = run_json(capsys, "surj-count", "4", "2", "--list")
    assert code == 0 and rep["results"]["count"] == 14 and len(rep["results"]["surjections"]) == 14


def test_verify_perm(capsys):
    code, rep = run_json(capsys, "verify", "perm", "--max-x", "4")
    assert code == 0 and rep["results"]["passed"] == rep["results"]["total"] > 0


def test_verify_fault_injection_fails(capsys):
    code, rep = run_json(capsys, "verify", "koszul", "--max-b", "4", "--inject-fault")
    assert code == 1 and rep["status"] == "fail"
    failed = [c for c in rep["checks"] if not c["passed"]]
    assert failed and all(c["name"].startswith("cohomology_concentration") for c in failed)
    # a corrupted sign either breaks d^2 = 0 or shifts the cohomology ranks
    assert any(c["detail"].get("error") == "ValidationError" for c in failed)


def test_verify_deterministic_across_jobs(capsys):
    _, first, _ = run(capsys, "verify", "all", "--max-b", "4", "--max-x", "4", "--json")
    _, second, _ = run(capsys, "verify", "all", "--max-b", "4", "--max-x", "4", "--json", "--jobs", "2")
    assert first == second


def test_timing_is_opt_in(capsys):
    code, rep = run_json(capsys, "rk-table", "--max-b", "3", "--timing")
    assert code == 0 and "seconds" in rep["timing"]


def test_cache_roundtrip(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FINKOSZUL_CACHE_DIR", str(tmp_path))
    _, first, _ = run(capsys, "rk-table", "--max-b", "4", "--json")
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and files[0].name.startswith("rk-table-")
    _, second, _ = run(capsys, "rk-table", "--max-b", "4", "--json")
    assert first == second
    run(capsys, "surj-count", "3", "2", "--list")
    assert len(list(tmp_path.iterdir())) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "finkoszul.cli", "surj-count", "5", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "150" in proc.stdout


def test_verify_all_passes(capsys):
    code, rep = run_json(capsys, "verify", "all", "--max-b", "5")
    assert code == 0 and rep["results"]["passed"] == rep["results"]["total"]
    assert {c["suite"] for c in rep["checks"]} == {"koszul", "subcomplex", "cosimp", "perm", "char"}
