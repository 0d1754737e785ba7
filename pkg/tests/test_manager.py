import pytest

from src.database.manager import ReportStore
from src.errors import StoreError
from src.models.report import CheckRecord, CheckStatus, VerificationReport


def make_report(suite="symmetry", seed=0, statuses=("pass", "pass")):
    records = [CheckRecord(f"check[{k}]", "anchor", CheckStatus(status),
                           "" if status == "pass" else "(* 2 w1)", 0.01, k == 1, {"k": k})
               for k, status in enumerate(statuses)]
    return VerificationReport(suite, seed, records, config={"suite": suite, "seed": seed})


@pytest.fixture
def store(tmp_path):
    store = ReportStore(str(tmp_path / "history.db"))
    store.initialize_database()
    return store


def test_save_and_get(store):
    report = make_report(statuses=("pass", "fail"))
    run_id = store.save_report(report)
    stored = store.get_report(run_id)
    assert stored.suite == "symmetry"
    assert stored.statuses() == {"check[0]": "pass", "check[1]": "fail"}
    assert stored.records[1].residual == "(* 2 w1)"
    assert stored.records[1].probabilistic
    assert stored.records[0].details == {"k": 0}
    assert stored.config == {"suite": "symmetry", "seed": 0}
    assert not stored.passed


def test_missing_run(store):
    assert store.get_report(42) is None


def test_initialize_twice(store):
    store.initialize_database()
    assert store.list_runs() == []


def test_list_runs(store):
    first = store.save_report(make_report())
    second = store.save_report(make_report("recursion", statuses=("pass", "inconclusive")))
    runs = store.list_runs()
    assert [r.id for r in runs] == [second, first]
    assert runs[0].counts == {"pass": 1, "fail": 0, "inconclusive": 1}
    assert not runs[0].passed and runs[1].passed
    assert [r.id for r in store.list_runs("symmetry")] == [first]
    assert len(store.list_runs(limit=1)) == 1


def test_compare_runs(store):
    first = store.save_report(make_report(statuses=("pass", "pass")))
    same = store.save_report(make_report(statuses=("pass", "pass")))
    other = store.save_report(make_report(statuses=("pass", "fail", "pass")))
    assert store.compare_runs(first, same).identical
    comparison = store.compare_runs(first, other)
    assert comparison.changed == {"check[1]": ("pass", "fail")}
    assert comparison.only_second == ["check[2]"]
    assert comparison.only_first == []


def test_compare_missing_run(store):
    run_id = store.save_report(make_report())
    with pytest.raises(StoreError):
        store.compare_runs(run_id, run_id + 1)


def test_delete_run(store):
    run_id = store.save_report(make_report())
    store.delete_run(run_id)
    assert store.get_report(run_id) is None
    with pytest.raises(StoreError):
        store.delete_run(run_id)
