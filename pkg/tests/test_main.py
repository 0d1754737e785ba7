import json

import pytest

from src.database.manager import ReportStore
from src.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from src.models.report import CheckRecord, CheckStatus, VerificationReport


def test_history_on_an_empty_database(tmp_path, capsys):
    assert main(["history", "--db", str(tmp_path / "history.db")]) == EXIT_OK
    assert "No stored runs" in capsys.readouterr().out


def test_history_unknown_run(tmp_path):
    assert main(["history", "--db", str(tmp_path / "history.db"), "--show", "9"]) == EXIT_USAGE


def test_unknown_suite():
    assert main(["run", "--suite", "everything", "-q"]) == EXIT_USAGE


def test_partial_hamiltonian_parameters():
    assert main(["run", "--suite", "hamiltonian", "--theta", "1", "-q"]) == EXIT_USAGE


def test_apply_recursion(capsys):
    assert main(["apply-recursion", "--op", "R3:1", "--field", "D", "--format", "json", "-q"]) \
        == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["operator"] == "R3[(1)A^0]"
    assert data["image"][:2] == ["0", "0"]
    assert data["status"] == "pass"


@pytest.mark.parametrize("op,field", [("R4:bogus", "G2"), ("T", "Q(w0)"), ("R1:K", "D")])
def test_apply_recursion_rejects_bad_text(op, field):
    assert main(["apply-recursion", "--op", op, "--field", field, "-q"]) == EXIT_USAGE


def test_generate_ultra(tmp_path):
    csv_path = tmp_path / "ultra.csv"
    out = tmp_path / "summary.json"
    assert main(["generate", "--family", "ultra", "--size", "11", "--csv", str(csv_path),
                 "--format", "json", "--out", str(out), "-q"]) == EXIT_OK
    assert csv_path.read_text().startswith("t,x,r1,r2,r3")
    sidecar = json.loads(csv_path.with_suffix(".json").read_text())
    assert sidecar["parameters"] == {"c1": "3/10", "c2": "1/5", "W": "tanh(u)"}
    summary = json.loads(out.read_text())
    assert summary["family"] == "ultra"
    assert summary["residual_norms"]["max"][0] == 0


def test_generate_degenerate_seed():
    assert main(["generate", "--family", "regular", "--psi", "exp(r1_0/2 - r2_0/2)",
                 "-q"]) == EXIT_USAGE


@pytest.mark.slow
def test_run_and_history(tmp_path, capsys):
    db = str(tmp_path / "history.db")
    assert main(["run", "--suite", "cosymmetry", "--seed", "2", "--db", db, "-q"]) == EXIT_OK
    assert main(["run", "--suite", "cosymmetry", "--seed", "2", "--db", db, "-q"]) == EXIT_OK
    capsys.readouterr()
    assert main(["history", "--db", db, "--compare", "1", "2", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["identical"]
    assert main(["history", "--db", db, "--show", "1", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["suite"] == "cosymmetry"


def test_compare_reports_differences(tmp_path):
    db = str(tmp_path / "history.db")
    store = ReportStore(db)
    store.initialize_database()
    for status in ("pass", "fail"):
        store.save_report(VerificationReport("symmetry", 0, [CheckRecord("a", "", CheckStatus(status))]))
    assert main(["history", "--db", db, "--compare", "1", "2", "-q"]) == EXIT_FAILED
