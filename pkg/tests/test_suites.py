import pytest
import sympy as sp

from src.errors import ConstraintViolated, DegenerateJet
from src.models import conservation
from src.models.conservation import Equivalence
from src.models.config import SuiteConfig
from src.models.report import CheckResult, CheckStatus, VerificationReport
from src.models.suites import CheckSpec, VerificationRunner, run_suite


def raise_error(error):
    def run(rng):
        raise error
    return run


@pytest.mark.parametrize("error,status", [
    (ConstraintViolated("side condition"), CheckStatus.FAIL),
    (DegenerateJet("r1_x vanishes"), CheckStatus.INCONCLUSIVE),
])
def test_engine_errors_become_statuses(error, status):
    runner = VerificationRunner(SuiteConfig(suite="symmetry"))
    result, wall_time = runner._run_one(CheckSpec("broken", "anchor", raise_error(error)), (0, 0))
    assert result.status == status
    assert wall_time >= 0


def test_constraint_report_is_kept():
    inner = CheckResult("inner", CheckStatus.FAIL, ["w1"])
    runner = VerificationRunner(SuiteConfig(suite="symmetry"))
    result, _ = runner._run_one(CheckSpec("broken", "anchor",
                                          raise_error(ConstraintViolated("bad", inner))), (0, 0))
    assert result is inner


@pytest.mark.slow
def test_cosymmetry_suite():
    report = run_suite("cosymmetry", SuiteConfig(seed=5))
    report.validate()
    assert report.passed
    assert report.counts["pass"] == len(report.records) == 12
    assert all(record.anchor == "cosymmetry families" for record in report.records)


@pytest.mark.slow
def test_same_seed_reproduces_statuses():
    first = run_suite("cosymmetry", SuiteConfig(seed=3, workers=4))
    second = run_suite("cosymmetry", SuiteConfig(seed=3))
    assert first.statuses() == second.statuses()
    assert [r.id for r in first.records] == [r.id for r in second.records]


@pytest.mark.slow
def test_report_json_round_trip():
    report = run_suite("cosymmetry", SuiteConfig(seed=1))
    restored = VerificationReport.from_dict(report.to_dict())
    assert restored.statuses() == report.statuses()
    assert "cosymmetry" in report.to_text()


def counterpart_check(runner):
    return next(check for check in runner._conservation_checks() if check.id == "kg_counterpart")


@pytest.mark.slow
def test_counterpart_check_passes_with_ratio_two():
    runner = VerificationRunner(SuiteConfig(suite="conservation"))
    result, _ = runner._run_one(counterpart_check(runner), (0, 0))
    assert result.status == CheckStatus.PASS


@pytest.mark.parametrize("ratio,status", [(2, CheckStatus.PASS), (-2, CheckStatus.FAIL)])
def test_counterpart_check_requires_positive_ratio(ratio, status, monkeypatch):
    monkeypatch.setattr(conservation, "equivalent_currents",
                        lambda first, second, rng: Equivalence(True, sp.Integer(ratio)))
    runner = VerificationRunner(SuiteConfig(suite="conservation"))
    result, _ = runner._run_one(counterpart_check(runner), (0, 0))
    assert result.status == status
