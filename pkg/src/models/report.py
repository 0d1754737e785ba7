"""
Check results and verification reports.
"""
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from importlib import resources
from typing import Any, Dict, List, Optional, Sequence

import jsonschema
import numpy as np
import sympy as sp

from .. import __version__
from ..errors import DriftFluxError, Inconclusive, SingularEvaluation
from ..kernel.expression import zero_test

logger = logging.getLogger(__name__)

ENGINE_VERSION = __version__
_RESIDUAL_TEXT_LIMIT = 2000


class CheckStatus(Enum):
    """Outcome of a single check."""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"  # no symbolic or numeric verdict could be reached


def residual_text(residual) -> str:
    """Printable residual, truncated for storage."""
    text = residual if isinstance(residual, str) else sp.sstr(residual)
    if len(text) > _RESIDUAL_TEXT_LIMIT:
        return text[:_RESIDUAL_TEXT_LIMIT] + " ..."
    return text


@dataclass
class CheckResult:
    """
    Verdict of one verification, with the residuals that decided it.
    """
    name: str
    status: CheckStatus
    residuals: List[str] = field(default_factory=list)
    probabilistic: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def from_residuals(cls, name: str, residuals: Sequence,
                       rng: Optional[np.random.Generator] = None, **details) -> "CheckResult":
        """PASS iff every residual expression is zero."""
        probabilistic = False
        failing = []
        try:
            for residual in residuals:
                verdict = zero_test(residual, rng)
                probabilistic = probabilistic or verdict.probabilistic
                if not verdict:
                    failing.append(verdict.residual)
        except (Inconclusive, SingularEvaluation) as e:
            logger.warning("Check %s is inconclusive: %s", name, str(e))
            return cls(name, CheckStatus.INCONCLUSIVE, [str(e)], True, dict(details))
        if probabilistic:
            logger.warning("Check %s relied on numeric sampling", name)
        status = CheckStatus.FAIL if failing else CheckStatus.PASS
        return cls(name, status, [residual_text(r) for r in failing], probabilistic, dict(details))

    @classmethod
    def from_bool(cls, name: str, holds: bool, residuals: Sequence = (), **details) -> "CheckResult":
        return cls(name, CheckStatus.PASS if holds else CheckStatus.FAIL,
                   [] if holds else [residual_text(r) for r in residuals], False, dict(details))


@dataclass
class CheckRecord:
    """One line of a verification report."""
    id: str
    anchor: str
    status: CheckStatus
    residual: str = ""
    wall_time: float = 0.0
    probabilistic: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_result(cls, check_id: str, anchor: str, result: CheckResult,
                    wall_time: float) -> "CheckRecord":
        return cls(check_id, anchor, result.status, "; ".join(result.residuals),
                   round(wall_time, 6), result.probabilistic, result.details)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["status"] = self.status.value
        data["details"] = _jsonable(self.details)
        return data


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    if isinstance(value, sp.Basic):
        return residual_text(value)
    return value


@dataclass
class VerificationReport:
    """
    Result of running one or more verification suites.
    """
    suite: str
    seed: int
    records: List[CheckRecord] = field(default_factory=list)
    engine_version: str = ENGINE_VERSION
    started_at: datetime = field(default_factory=datetime.now)
    finished_at: Optional[datetime] = None
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.status == CheckStatus.PASS for r in self.records)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for record in self.records:
            counts[record.status.value] += 1
        return counts

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def statuses(self) -> Dict[str, str]:
        return {r.id: r.status.value for r in self.records}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "engine_version": self.engine_version,
            "started_at": self.started_at.isoformat(),
            "finished_at": self.finished_at.isoformat() if self.finished_at else None,
            "passed": self.passed,
            "counts": self.counts,
            "config": _jsonable(self.config),
            "checks": [r.to_dict() for r in self.records],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self) -> str:
        lines = [f"Suite: {self.suite}  seed: {self.seed}  engine: {self.engine_version}"]
        for record in self.records:
            marker = "~" if record.probabilistic else " "
            lines.append(f"  [{record.status.value.upper():12}]{marker} {record.id}"
                         f"  ({record.wall_time:.2f}s)  {record.anchor}")
            if record.status != CheckStatus.PASS and record.residual:
                lines.append(f"      residual: {record.residual}")
        counts = self.counts
        lines.append(f"Total: {len(self.records)} checks, {counts['pass']} passed, "
                     f"{counts['fail']} failed, {counts['inconclusive']} inconclusive")
        return "\n".join(lines)

    def validate(self) -> None:
        """Validate the JSON form against the shipped schema."""
        jsonschema.validate(instance=self.to_dict(), schema=load_schema())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        records = [CheckRecord(c["id"], c["anchor"], CheckStatus(c["status"]), c.get("residual", ""),
                               c.get("wall_time", 0.0), c.get("probabilistic", False),
                               c.get("details", {}))
                   for c in data.get("checks", [])]
        finished = data.get("finished_at")
        return cls(data["suite"], data["seed"], records, data.get("engine_version", ENGINE_VERSION),
                   datetime.fromisoformat(data["started_at"]),
                   datetime.fromisoformat(finished) if finished else None,
                   data.get("config", {}))


def load_schema() -> Dict[str, Any]:
    text = resources.files("src.schemas").joinpath("verification_report.schema.json").read_text()
    return json.loads(text)


def timed(function, *args, **kwargs):
    """(result, seconds) of a call; engine errors become INCONCLUSIVE results."""
    start = time.perf_counter()
    try:
        result = function(*args, **kwargs)
    except DriftFluxError as e:
        logger.warning("Check raised %s: %s", type(e).__name__, str(e))
        result = CheckResult(getattr(function, "__name__", "check"), CheckStatus.INCONCLUSIVE,
                             [f"{type(e).__name__}: {str(e)}"], False,
                             {"error": type(e).__name__})
    return result, time.perf_counter() - start
