"""Tests for runtime configuration."""

import json

import pytest

from quenched_clt.config import THREADS_ENV_VAR, Config


class TestConfig:
    def test_defaults(self, config):
        assert config.simulation.threads == 1
        assert config.simulation.batch_size == 1000
        assert config.tolerances.row_sum == 1e-9
        assert config.verdicts.fail_on_any_state
        assert not config.verdicts.allow_inconclusive
        assert config.logging.level == "INFO"

    def test_from_dict_partial(self):
        config = Config.from_dict({"simulation": {"threads": 4}, "verdicts": {"allow_inconclusive": True}})
        assert config.simulation.threads == 4
        assert config.simulation.block_length == 4096
        assert config.verdicts.allow_inconclusive

    def test_unknown_key_rejected(self):
        with pytest.raises(TypeError):
            Config.from_dict({"simulation": {"thread": 4}})

    def test_from_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("simulation:\n  batch_size: 50\nlogging:\n  level: DEBUG\n")
        config = Config.from_yaml(str(path))
        assert config.simulation.batch_size == 50
        assert config.logging.level == "DEBUG"

    def test_empty_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("")
        assert Config.from_yaml(str(path)).simulation.threads == 1

    def test_from_toml(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("[tolerances]\nks_bias_allowance = 0.01\nks_finite_n = 1.5\n")
        tolerances = Config.from_toml(str(path)).tolerances
        assert tolerances.ks_bias_allowance == 0.01
        assert tolerances.ks_finite_n == 1.5

    def test_from_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"simulation": {"block_length": 10}}))
        assert Config.from_json(str(path)).simulation.block_length == 10


class TestResolveThreads:
    def test_override_wins(self, config, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        assert config.resolve_threads(3) == 3

    def test_environment(self, config, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        assert config.resolve_threads() == 8

    def test_bad_environment_ignored(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        config = Config.from_dict({"simulation": {"threads": 2}})
        assert config.resolve_threads() == 2

    def test_at_least_one(self, config, monkeypatch):
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        assert config.resolve_threads(0) == 1
