"""Report serializer - condition reports as JSON documents and a flat CSV table."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Mapping

from .types import ConditionReport, _jsonable


def _fmt(value: float) -> str:
    return repr(float(value))


class ReportSerializer:
    """
    Writes diagnostics to disk.

    JSON holds the reports as a list in run order (a per-state condition
    appears once per start state) plus any extra checks (objects with
    to_dict). CSV is long-format with one row per sequence
    point: condition_id, start, index_name, index, value, verdict
    (start is empty for stationary conditions).
    """

    def serialize(
        self,
        reports: Iterable[ConditionReport],
        checks: Mapping[str, Any] | None = None,
    ) -> dict[str, Any]:
        data: dict[str, Any] = {"conditions": [r.to_dict() for r in reports]}
        if checks:
            data["checks"] = {
                name: check.to_dict() if hasattr(check, "to_dict") else _jsonable(check)
                for name, check in checks.items()
            }
        return data

    def rows(self, reports: Iterable[ConditionReport]) -> list[list[str]]:
        out = []
        for report in reports:
            for index, value in report.sequence:
                out.append([
                    report.condition_id.value,
                    str(report.extra.get("start", "")),
                    report.index_name,
                    _fmt(index),
                    _fmt(value),
                    report.verdict.value,
                ])
        return out

    def write_json(
        self,
        reports: Iterable[ConditionReport],
        path: str | Path,
        checks: Mapping[str, Any] | None = None,
    ) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.serialize(reports, checks), f, indent=2, sort_keys=True)
            f.write("\n")
        return path

    def write_csv(self, reports: Iterable[ConditionReport], path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["condition_id", "start", "index_name", "index", "value", "verdict"])
            writer.writerows(self.rows(reports))
        return path
