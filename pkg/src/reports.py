"""
Structured results shared by every check and command.

Validation never raises for a violated law: it returns a ValidationReport whose
issues carry witnesses, the way a reviewer lists findings.
"""

import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"


def render(value: Any) -> str:
    """Stable text rendering of an atom or witness value."""
    if isinstance(value, str):
        return value
    return repr(value)


class Issue(BaseModel):
    law: str
    witness: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def of(cls, law: str, **witness) -> "Issue":
        return cls(law=law, witness={k: render(v) for k, v in witness.items()})


class ValidationReport(BaseModel):
    name: str
    status: str = PASS
    checked: int = 0
    skipped: int = 0
    issues: List[Issue] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def add(self, law: str, **witness):
        self.issues.append(Issue.of(law, **witness))
        self.status = FAIL

    def merge(self, other: "ValidationReport"):
        """Folds another report's counts and issues into this one."""
        self.checked += other.checked
        self.skipped += other.skipped
        for issue in other.issues:
            self.issues.append(issue)
        if not other.ok:
            self.status = FAIL
        return self

    def laws_failed(self) -> List[str]:
        return sorted({issue.law for issue in self.issues})

    def summary(self) -> str:
        return f"{self.name}: {self.status} (checked {self.checked}, skipped {self.skipped}, issues {len(self.issues)})"


def log_report(report: ValidationReport, quiet: bool = False):
    """One summary line per check; witnesses go to DEBUG."""
    logger.log(logging.DEBUG if quiet else logging.INFO, report.summary())
    for issue in report.issues:
        logger.debug(f"{report.name}: {issue.law} {issue.witness}")


class StopCheck(Exception):
    """Raised inside a fail-fast check to unwind after the first issue."""


class Checker:
    """
    Small helper that records issues into a report and honours fail_fast.
    """

    def __init__(self, name: str, fail_fast: bool = False):
        self.report = ValidationReport(name=name)
        self.fail_fast = fail_fast

    def tick(self, n: int = 1):
        self.report.checked += n

    def skip(self, n: int = 1):
        self.report.skipped += n

    def fail(self, law: str, **witness):
        self.report.add(law, **witness)
        if self.fail_fast:
            raise StopCheck()

    def expect(self, condition: bool, law: str, **witness) -> bool:
        self.tick()
        if not condition:
            self.fail(law, **witness)
        return condition


class CommandReport(BaseModel):
    command: str
    verdict: str = PASS
    checks: List[ValidationReport] = Field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    details: Dict[str, Any] = Field(default_factory=dict)
    timing: Optional[Dict[str, float]] = None

    def add_check(self, report: ValidationReport):
        self.checks.append(report)
        if not report.ok:
            self.verdict = FAIL
