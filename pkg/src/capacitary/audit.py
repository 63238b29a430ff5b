"""Labeled inequality records and their CSV form."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .grid import format_number

RTOL = 1e-10
ATOL = 1e-12

EXACT = "exact"
EQUALITY = "equality"
MEASURED = "measured"


@dataclass(frozen=True)
class AuditRecord:
    """One line of an audit.

    ``kind`` is ``exact`` (a theorem-level inequality lhs <= rhs that must
    hold up to rounding), ``equality`` (lhs == rhs up to rounding) or
    ``measured`` (rhs is the un-scaled right-hand side; lhs / rhs is the
    measured constant and ``holds`` only asserts that it is finite).
    """

    check_id: str
    label: str
    lhs: float
    rhs: float
    holds: bool
    kind: str = EXACT

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def csv_row(self) -> list[str]:
        return [
            self.check_id,
            self.label,
            format_number(self.lhs),
            format_number(self.rhs),
            format_number(self.slack),
            "true" if self.holds else "false",
        ]


@dataclass
class InequalityAudit:
    records: list[AuditRecord] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(r.holds for r in self.records)

    @property
    def exact_ok(self) -> bool:
        """Conjunction over the theorem-exact and equality records only."""
        return all(r.holds for r in self.records if r.kind != MEASURED)

    def add_exact(self, check_id, label, lhs, rhs, rtol=RTOL, atol=ATOL) -> AuditRecord:
        lhs, rhs = float(lhs), float(rhs)
        ok = lhs <= rhs * (1 + rtol) + atol
        return self._add(AuditRecord(check_id, label, lhs, rhs, ok, EXACT))

    def add_equality(self, check_id, label, lhs, rhs, rtol=RTOL, atol=ATOL) -> AuditRecord:
        lhs, rhs = float(lhs), float(rhs)
        ok = abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs)) + atol
        return self._add(AuditRecord(check_id, label, lhs, rhs, ok, EQUALITY))

    def add_measured(self, check_id, label, lhs, rhs) -> AuditRecord:
        lhs, rhs = float(lhs), float(rhs)
        rec = AuditRecord(check_id, label, lhs, rhs, False, MEASURED)
        ok = math.isfinite(lhs) and math.isfinite(rhs) and math.isfinite(rec.ratio)
        return self._add(AuditRecord(check_id, label, lhs, rhs, ok, MEASURED))

    def _add(self, rec: AuditRecord) -> AuditRecord:
        self.records.append(rec)
        return rec

    def extend(self, other: InequalityAudit) -> None:
        self.records.extend(other.records)

    def __getitem__(self, check_id: str) -> AuditRecord:
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check_id", "label", "lhs", "rhs", "slack", "holds"])
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()
