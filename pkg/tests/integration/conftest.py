"""Fixtures for end-to-end CLI runs: experiment files written to a temp directory."""

import json
from pathlib import Path

import pytest


def write_experiment(directory: Path, name: str = "experiment.json", **fields) -> Path:
    """Experiment file for the two-state chain with f = (3, -1), overridable per test."""
    data = {
        "seed": 42,
        "kernel": {"builder": "two_state", "params": {"p": 0.3, "q": 0.1}},
        "observable": {"values": [3.0, -1.0]},
        "count": 200,
        "n_grid": [100],
    }
    data.update(fields)
    path = directory / name
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def experiment_file(tmp_path):
    def _write(**fields):
        return write_experiment(tmp_path, **fields)
    return _write


@pytest.fixture
def two_state_file(tmp_path) -> Path:
    path = tmp_path / "chain.yaml"
    path.write_text("states: [a, b]\nrows:\n  - [0.7, 0.3]\n  - [0.1, 0.9]\n")
    return path


@pytest.fixture
def two_cycle_file(tmp_path) -> Path:
    path = tmp_path / "cycle.json"
    path.write_text(json.dumps({"rows": [[0.0, 1.0], [1.0, 0.0]]}))
    return path
