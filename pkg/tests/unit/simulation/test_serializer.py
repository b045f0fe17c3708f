"""Tests for ensemble output files."""

import csv
import json

from quenched_clt.simulation import EnsembleSerializer, quenched_ensemble


class TestEnsembleSerializer:
    def test_header(self, chain, f):
        summary = quenched_ensemble(chain, f, 1, 0, 10, 3, 1, grid=(0.5, 1.0))
        header = EnsembleSerializer().header(summary)
        assert header[:2] == ["path_index", "start_state"]
        assert header[-2:] == ["t=0.5", "t=1.0"]

    def test_csv_rows_in_path_order(self, chain, f, tmp_path):
        summary = quenched_ensemble(chain, f, 1, 0, 10, 5, 1, path_offset=20)
        path = EnsembleSerializer().write_csv(summary, tmp_path / "out" / "paths.csv")
        with open(path, encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 6
        assert [r[0] for r in rows[1:]] == ["20", "21", "22", "23", "24"]
        assert float(rows[1][2]) == summary.normalized_endpoints[0]

    def test_byte_identical_reruns(self, chain, f, tmp_path):
        serializer = EnsembleSerializer()
        first = serializer.write_csv(quenched_ensemble(chain, f, 1, 0, 30, 8, 2), tmp_path / "a.csv")
        second = serializer.write_csv(quenched_ensemble(chain, f, 1, 0, 30, 8, 2), tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_json_aggregates(self, chain, f, tmp_path):
        summary = quenched_ensemble(chain, f, 3, 1, 10, 4, 6)
        path = EnsembleSerializer().write_json(summary, tmp_path / "summary.json")
        data = json.loads(path.read_text())
        assert data["count"] == 4
        assert data["m"] == 3
        assert data["start"] == "1"
        assert len(data["grid_variance"]) == 4
