"""Ensemble serializer - CSV per-path rows and JSON aggregates."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .types import EnsembleSummary


def _fmt(value: float) -> str:
    # repr round-trips doubles exactly, so equal runs give equal bytes
    return repr(float(value))


class EnsembleSerializer:
    """
    Writes EnsembleSummary objects to disk.

    CSV has one row per path in path-index order:
    path_index, start_state, endpoint, max_stat, max_signed, max_rbar,
    rbar_endpoint, then one column per grid time (t=0.25, ...).
    """

    def header(self, summary: EnsembleSummary) -> list[str]:
        return [
            "path_index", "start_state", "endpoint", "max_stat", "max_signed",
            "max_rbar", "rbar_endpoint",
        ] + [f"t={t!r}" for t in summary.grid]

    def rows(self, summary: EnsembleSummary) -> list[list[str]]:
        out = []
        for i in range(summary.count):
            row = [
                str(summary.path_offset + i),
                str(int(summary.start_states[i])),
                _fmt(summary.normalized_endpoints[i]),
                _fmt(summary.max_stats[i]),
                _fmt(summary.max_signed[i]),
                _fmt(summary.max_rbar[i]),
                _fmt(summary.rbar_endpoints[i]),
            ]
            row.extend(_fmt(v) for v in summary.scaled_paths[i])
            out.append(row)
        return out

    def serialize(self, summary: EnsembleSummary) -> dict[str, Any]:
        """Aggregate statistics as a JSON-ready dict."""
        return summary.aggregates()

    def write_csv(self, summary: EnsembleSummary, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.header(summary))
            writer.writerows(self.rows(summary))
        return path

    def write_json(self, summary: EnsembleSummary, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.serialize(summary), f, indent=2, sort_keys=True)
            f.write("\n")
        return path
