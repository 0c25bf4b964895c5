"""Detect documents whose blocks sit on both sides of a fold."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple

LEAK = "leak"
UNAVOIDABLE = "unavoidable-single-sample"


class Violation(NamedTuple):
    fold: int  # 1-based
    writer_id: str
    document_id: str
    tag: str


@dataclass
class AuditReport:
    violations: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def avoidable(self) -> list:
        return [v for v in self.violations if v.tag != UNAVOIDABLE]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fold", "writer_id", "document_id", "tag"])
        for v in self.violations:
            w.writerow(list(v))
        return buf.getvalue()


def audit_leakage(plan) -> AuditReport:
    violations = []
    for k, fold in enumerate(plan.folds, start=1):
        for writer in sorted(fold):
            wf = fold[writer]
            shared = sorted(wf.train_documents & wf.test_documents)
            tag = UNAVOIDABLE if writer in plan.fallback_writers else LEAK
            violations.extend(Violation(k, writer, doc, tag) for doc in shared)
    return AuditReport(violations)
