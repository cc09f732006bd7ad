"""Check records, reports, and the shared residual metric.

Every verification operation returns a Report: a flat list of per-check
records plus summary accessors.  The residual metric is absolute when both
compared values are tiny (canonical objects vanish identically for flat
metrics, where relative error is undefined) and relative otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable

__all__ = ["residual", "CheckRecord", "Report", "report_to_json"]

ABS_FLOOR = 1e-6  # below this magnitude the residual is absolute


def residual(got: float, want: float) -> float:
    """Hybrid absolute/relative discrepancy between two values."""
    scale = max(abs(got), abs(want))
    err = abs(got - want)
    if scale < ABS_FLOOR:
        return err
    return err / scale


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    chart: str
    point: tuple[float, ...]
    residual: float
    passed: bool

    def with_chart(self, chart: str) -> "CheckRecord":
        return replace(self, chart=chart)


@dataclass(frozen=True)
class Report:
    records: tuple[CheckRecord, ...]

    @classmethod
    def of(cls, records: Iterable[CheckRecord]) -> "Report":
        return cls(tuple(records))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.records), default=0.0)

    def max_residual_by_family(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for r in self.records:
            out[r.check_id] = max(out.get(r.check_id, 0.0), r.residual)
        return out

    def failures(self) -> tuple[CheckRecord, ...]:
        return tuple(r for r in self.records if not r.passed)

    def merged_with(self, other: "Report") -> "Report":
        return Report(self.records + other.records)


def report_to_json(report: Report) -> str:
    """Deterministic JSON rendering: fixed key order, canonical record order."""
    payload = {
        "summary": {
            "pass": report.passed,
            "max_residual": report.max_residual_by_family(),
        },
        "records": [
            {
                "check_id": r.check_id,
                "chart": r.chart,
                "point": list(r.point),
                "residual": r.residual,
                "pass": r.passed,
            }
            for r in report.records
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
