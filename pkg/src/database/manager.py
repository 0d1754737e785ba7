from datetime import datetime
import sqlite3
from typing import List, Optional, Dict, Any
from dataclasses import dataclass
import json

from ..errors import StoreError
from ..models.report import CheckRecord, CheckStatus, VerificationReport


@dataclass
class RunSummary:
    id: int
    suite: str
    seed: int
    engine_version: str
    started_at: datetime
    passed: bool
    counts: Dict[str, int]


@dataclass
class RunComparison:
    """Differences between the check statuses of two runs."""
    first_id: int
    second_id: int
    changed: Dict[str, tuple]  # check id -> (first status, second status)
    only_first: List[str]
    only_second: List[str]

    @property
    def identical(self) -> bool:
        return not (self.changed or self.only_first or self.only_second)


class ReportStore:
    def __init__(self, db_path: str):
        """Initialize the report store with the specified database path."""
        self.db_path = db_path

    def initialize_database(self) -> None:
        """Create the runs and checks tables if they do not exist."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                # Enable foreign key support
                cursor.execute('PRAGMA foreign_keys = ON')

                # One row per suite run
                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        suite TEXT NOT NULL,
                        seed INTEGER NOT NULL,
                        engine_version TEXT NOT NULL,
                        started_at TEXT NOT NULL,
                        finished_at TEXT,
                        passed BOOLEAN NOT NULL,
                        config TEXT NOT NULL,
                        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                    )
                ''')

                # Individual check records of a run
                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS checks (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        run_id INTEGER NOT NULL,
                        position INTEGER NOT NULL,
                        check_id TEXT NOT NULL,
                        anchor TEXT NOT NULL,
                        status TEXT NOT NULL,
                        residual TEXT,
                        wall_time REAL NOT NULL,
                        probabilistic BOOLEAN NOT NULL DEFAULT 0,
                        details TEXT,
                        FOREIGN KEY (run_id) REFERENCES runs (id) ON DELETE CASCADE,
                        CHECK (status IN ('pass', 'fail', 'inconclusive'))
                    )
                ''')

                cursor.execute('''
                    CREATE INDEX IF NOT EXISTS idx_checks_run
                    ON checks(run_id, position)
                ''')
                conn.commit()
        except sqlite3.Error as e:
            raise StoreError(f"Failed to initialize report history: {str(e)}")

    def save_report(self, report: VerificationReport) -> int:
        """Store a report and all of its check records; returns the run id."""
        data = report.to_dict()
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()
            try:
                cursor.execute('''
                    INSERT INTO runs (suite, seed, engine_version, started_at,
                                      finished_at, passed, config)
                    VALUES (?, ?, ?, ?, ?, ?, ?)
                ''', (
                    report.suite,
                    report.seed,
                    report.engine_version,
                    data["started_at"],
                    data["finished_at"],
                    report.passed,
                    json.dumps(data["config"])
                ))
                run_id = cursor.lastrowid

                cursor.executemany('''
                    INSERT INTO checks (run_id, position, check_id, anchor, status,
                                        residual, wall_time, probabilistic, details)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                ''', [
                    (run_id, position, record["id"], record["anchor"], record["status"],
                     record["residual"], record["wall_time"], record["probabilistic"],
                     json.dumps(record["details"]))
                    for position, record in enumerate(data["checks"])
                ])
                conn.commit()
                return run_id
            except sqlite3.Error as e:
                conn.rollback()
                raise StoreError(f"Failed to save report: {str(e)}")

    def get_report(self, run_id: int) -> Optional[VerificationReport]:
        """Rebuild a stored report, or None when the run does not exist."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()
                cursor.execute('SELECT * FROM runs WHERE id = ?', (run_id,))
                row = cursor.fetchone()
                if not row:
                    return None

                cursor.execute('''
                    SELECT * FROM checks WHERE run_id = ? ORDER BY position
                ''', (run_id,))
                records = [
                    CheckRecord(
                        id=check['check_id'],
                        anchor=check['anchor'],
                        status=CheckStatus(check['status']),
                        residual=check['residual'] or "",
                        wall_time=check['wall_time'],
                        probabilistic=bool(check['probabilistic']),
                        details=json.loads(check['details']) if check['details'] else {}
                    )
                    for check in cursor.fetchall()
                ]
        except sqlite3.Error as e:
            raise StoreError(f"Failed to read run {run_id}: {str(e)}")

        return VerificationReport(
            suite=row['suite'],
            seed=row['seed'],
            records=records,
            engine_version=row['engine_version'],
            started_at=datetime.fromisoformat(row['started_at']),
            finished_at=datetime.fromisoformat(row['finished_at']) if row['finished_at'] else None,
            config=json.loads(row['config'])
        )

    def list_runs(self, suite: Optional[str] = None, limit: int = 20) -> List[RunSummary]:
        """Most recent runs first, optionally for one suite."""
        query = '''
            SELECT r.*,
                   SUM(CASE WHEN c.status = 'pass' THEN 1 ELSE 0 END) AS n_pass,
                   SUM(CASE WHEN c.status = 'fail' THEN 1 ELSE 0 END) AS n_fail,
                   SUM(CASE WHEN c.status = 'inconclusive' THEN 1 ELSE 0 END) AS n_inconclusive
            FROM runs r
            LEFT JOIN checks c ON c.run_id = r.id
        '''
        params: List[Any] = []
        if suite:
            query += ' WHERE r.suite = ?'
            params.append(suite)
        query += ' GROUP BY r.id ORDER BY r.id DESC LIMIT ?'
        params.append(limit)

        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()
                cursor.execute(query, params)
                return [
                    RunSummary(
                        id=row['id'],
                        suite=row['suite'],
                        seed=row['seed'],
                        engine_version=row['engine_version'],
                        started_at=datetime.fromisoformat(row['started_at']),
                        passed=bool(row['passed']),
                        counts={'pass': row['n_pass'] or 0, 'fail': row['n_fail'] or 0,
                                'inconclusive': row['n_inconclusive'] or 0}
                    )
                    for row in cursor.fetchall()
                ]
        except sqlite3.Error as e:
            raise StoreError(f"Failed to list runs: {str(e)}")

    def compare_runs(self, first_id: int, second_id: int) -> RunComparison:
        """Compare check statuses of two runs; identical for reproducible re-runs."""
        first = self.get_report(first_id)
        second = self.get_report(second_id)
        if first is None or second is None:
            missing = first_id if first is None else second_id
            raise StoreError(f"Run {missing} not found")

        first_statuses, second_statuses = first.statuses(), second.statuses()
        changed = {
            check_id: (status, second_statuses[check_id])
            for check_id, status in first_statuses.items()
            if check_id in second_statuses and second_statuses[check_id] != status
        }
        return RunComparison(
            first_id=first_id,
            second_id=second_id,
            changed=changed,
            only_first=sorted(set(first_statuses) - set(second_statuses)),
            only_second=sorted(set(second_statuses) - set(first_statuses))
        )

    def delete_run(self, run_id: int) -> None:
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()
            try:
                cursor.execute('PRAGMA foreign_keys = ON')
                cursor.execute('DELETE FROM runs WHERE id = ?', (run_id,))
                if cursor.rowcount == 0:
                    raise StoreError(f"Run {run_id} not found")
                conn.commit()
            except sqlite3.Error as e:
                conn.rollback()
                raise StoreError(f"Failed to delete run: {str(e)}")
