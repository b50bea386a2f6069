import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from mpssnet import engine
from mpssnet import io as dio
from mpssnet.cli import main
from mpssnet.lp import LpSolution


@pytest.fixture
def table1_csv(data_dir):
    return str(data_dir / "table1.csv")


@pytest.fixture
def fyp_csv(data_dir):
    return str(data_dir / "fyp_synthetic.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_evaluate_decoupled(capsys, table1_csv, tmp_path):
    out_path = tmp_path / "t1.csv"
    code, _, err = run(capsys, "evaluate", "--dataset", table1_csv, "--mode", "decoupled",
                       "--out", str(out_path))
    assert code == 0
    assert "MPSS: 1 / 5" in err
    rows = dio.read_table_csv(out_path)
    got = {r[0]: [float(v) for v in r[1:4]] for r in rows[1:]}
    assert got == {"A": [1, 1.25, 2.25], "B": [0, 0, 0], "C": [1.9, 0, 1.9],
                   "D": [0.5, 1.25, 1.75], "E": [3.5, 2.625, 6.125]}


def test_evaluate_zero_input_exit_2(capsys, data_dir, tmp_path):
    for suffix in (".csv", ".cfg"):
        shutil.copy(data_dir / f"table1{suffix}", tmp_path / f"bad{suffix}")
    p = tmp_path / "bad.csv"
    p.write_text(p.read_text().replace("D,4,", "D,0,"))
    code, out, err = run(capsys, "evaluate", "--dataset", str(p))
    assert code == 2 and out == ""
    assert "NonpositiveInput" in err and "row D" in err and "X1" in err


def test_evaluate_joint(capsys, table1_csv):
    code, out, err = run(capsys, "evaluate", "--dataset", table1_csv, "--mode", "joint")
    assert code == 0 and "joint mode" in err
    rows = [r.split(",") for r in out.splitlines() if not r.startswith("#")]
    assert [r[0] for r in rows[1:]] == ["A", "B", "C", "D", "E"]
    for r in rows[1:]:
        assert r[-1] in ("Optimal", "Infeasible")
        if r[-1] == "Optimal":
            assert float(r[3]) == pytest.approx(float(r[1]) + float(r[2]), abs=2e-4)
        else:
            assert r[1:5] == ["", "", "", ""]


def test_bad_flags_exit_2(capsys, table1_csv):
    assert run(capsys, "evaluate", "--dataset", table1_csv, "--omega", "1,1,1")[0] == 2
    assert run(capsys, "sweep", "--dataset", table1_csv)[0] == 2
    assert run(capsys, "evaluate", "--dataset", "/nonexistent.csv")[0] == 2


def test_sweep_uniform_identical_columns(capsys, fyp_csv, tmp_path):
    out = tmp_path / "fyp.csv"
    code, _, err = run(capsys, "sweep", "--dataset", fyp_csv, "--epsilon", "0.1",
                       "--alpha-mode", "uniform", "--out", str(out))
    assert code == 0
    for name in ("overall", "Industry", "Agriculture"):
        rows = dio.read_table_csv(tmp_path / f"fyp_{name}.csv")
        assert len(rows[0]) == 10
        for r in rows[1:]:
            assert len(set(r[1:])) == 1, r


def test_sweep_single_column(capsys, fyp_csv):
    code, out, _ = run(capsys, "sweep", "--dataset", fyp_csv, "--epsilon", "0.5")
    assert code == 0
    header = [line for line in out.splitlines() if line.startswith("DMU")]
    assert header == ["DMU,k=1 (alpha=0.5)"] * 3


def test_sweep_target_only_counts(capsys, fyp_csv, tmp_path):
    out = tmp_path / "t.json"
    code, _, _ = run(capsys, "sweep", "--dataset", fyp_csv, "--alpha-mode", "target-only",
                     "--format", "json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    counts = [s["count"] for s in doc["tables"]["Industry"]["summary"]]
    # larger alpha raises every Industry score, so the count can only fall
    assert all(b <= a for a, b in zip(counts, counts[1:])), counts
    assert counts[0] > counts[-1]


def test_describe(capsys, table1_csv):
    code, out, _ = run(capsys, "describe", "--dataset", table1_csv)
    assert code == 0
    rows = {r[0]: r[1:] for r in (line.split(",") for line in out.splitlines()[1:])}
    assert rows["stat"] == ["X1", "X2", "Y1", "Y2"]  # inputs first, then outputs
    assert float(rows["Mean"][0]) == pytest.approx(3.2)
    assert float(rows["S.D."][0]) == pytest.approx(1.30384, abs=1e-5)
    assert (rows["Min"][0], rows["Max"][0]) == ("2.0", "5.0")


def test_describe_json(capsys, fyp_csv):
    code, out, _ = run(capsys, "describe", "--dataset", fyp_csv, "--format", "json")
    assert code == 0 and set(json.loads(out)) == {
        "Population", "GDP per capita", "GFC", "Industry VA", "Agriculture VA"}


def test_audit_table1(capsys, table1_csv):
    code, out, err = run(capsys, "audit", "--dataset", table1_csv)
    assert code == 0
    assert "audited 10 LPs, 0 failed" in err
    assert sum(": pass:" in line for line in out.splitlines()) == 10


def test_audit_joint(capsys, table1_csv):
    code, out, _ = run(capsys, "audit", "--dataset", table1_csv, "--mode", "joint")
    assert code == 0
    audited = [line for line in out.splitlines() if ": pass:" in line]
    listed = [line for line in out.splitlines() if "not audited" in line]
    assert len(audited) + len(listed) == 5


def test_audit_corrupted_solution_exit_4(capsys, table1_csv, monkeypatch):
    real = engine.solve

    def corrupt(lp, tol=None):
        sol = real(lp, tol)
        if lp.names[-1] == "phi1" and sol.optimal:
            x = np.array(sol.x)
            x[-1] += 0.5
            return LpSolution(sol.status, x, sol.duals, sol.objective + 0.5, sol.iterations)
        return sol

    monkeypatch.setattr(engine, "solve", corrupt)
    code, _, err = run(capsys, "audit", "--dataset", table1_csv)
    assert code == 4
    assert "certificate failed: A I" in err


def test_config_values_overridden_by_flags(capsys, data_dir, tmp_path):
    for suffix in (".csv", ".cfg"):
        shutil.copy(data_dir / f"table1{suffix}", tmp_path / f"t{suffix}")
    cfg = tmp_path / "t.cfg"
    cfg.write_text(cfg.read_text() + "mode = joint\n")
    _, out, _ = run(capsys, "evaluate", "--dataset", str(tmp_path / "t.csv"))
    assert "mode=joint" in out
    _, out, _ = run(capsys, "evaluate", "--dataset", str(tmp_path / "t.csv"), "--mode", "decoupled")
    assert "mode=decoupled" in out


def test_outputs_byte_identical(capsys, fyp_csv, table1_csv, tmp_path):
    for i in range(2):
        run(capsys, "sweep", "--dataset", fyp_csv, "--epsilon", "0.25", "--mode", "joint",
            "--jobs", str(i + 1), "--out", str(tmp_path / f"s{i}.csv"))
        run(capsys, "evaluate", "--dataset", table1_csv, "--format", "json",
            "--out", str(tmp_path / f"e{i}.json"))
    for stem in ("s0_overall", "s0_Industry", "s0_Agriculture"):
        other = stem.replace("s0", "s1")
        assert (tmp_path / f"{stem}.csv").read_bytes() == (tmp_path / f"{other}.csv").read_bytes()
    assert (tmp_path / "e0.json").read_bytes() == (tmp_path / "e1.json").read_bytes()


def test_console_entry_point(table1_csv):
    proc = subprocess.run([sys.executable, "-m", "mpssnet.cli", "evaluate", "--dataset", table1_csv],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "E,3.5000,2.6250,6.1250" in proc.stdout
