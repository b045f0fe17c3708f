"""Tests for diagnostics output files."""

import csv
import json

from quenched_clt.diagnostics import (
    ConditionId,
    ConditionReport,
    ReportSerializer,
    Verdict,
    covariance_bound_check,
    ui_probe,
)


def _negl(start, value):
    return ConditionReport(
        condition_id=ConditionId.NEGL_FCLT,
        sequence=((1, value),),
        verdict=Verdict.SATISFIED,
        extra={"start": start},
    )


class TestReportSerializer:
    def test_per_state_reports_kept_apart(self):
        data = ReportSerializer().serialize([_negl("0", 0.1), _negl("1", 0.2)])
        assert [c["extra"]["start"] for c in data["conditions"]] == ["0", "1"]
        assert "checks" not in data

    def test_checks_section(self, chain, f):
        data = ReportSerializer().serialize([], {"covariance": covariance_bound_check(chain, f, 1)})
        assert data["checks"]["covariance"]["holds"] is True

    def test_csv(self, chain, f, tmp_path):
        reports = [ui_probe(chain, f, m_grid=[1, 10]), _negl("1", 0.2)]
        path = ReportSerializer().write_csv(reports, tmp_path / "diagnostics.csv")
        with open(path, encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["condition_id", "start", "index_name", "index", "value", "verdict"]
        assert len(rows) == 4
        assert rows[1][:3] == ["UI_FMGF", "", "m"]
        assert rows[3][:2] == ["NEGL_FCLT", "1"]

    def test_json_round_trip(self, chain, f, tmp_path):
        path = ReportSerializer().write_json([ui_probe(chain, f, m_grid=[1])], tmp_path / "d.json")
        data = json.loads(path.read_text())
        assert data["conditions"][0]["condition_id"] == "UI_FMGF"
        assert data["conditions"][0]["verdict"] in {"satisfied", "violated", "inconclusive"}
