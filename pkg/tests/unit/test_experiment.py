"""Tests for experiment files."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from quenched_clt.diagnostics import ConditionId
from quenched_clt.experiment import ExperimentConfig, ExperimentError, load_experiment


def _minimal(**overrides):
    data = {
        "seed": 42,
        "kernel": {"builder": "two_state", "params": {"p": 0.3, "q": 0.1}},
        "observable": {"values": [3.0, -1.0]},
    }
    data.update(overrides)
    return data


class TestExperimentConfig:
    def test_defaults(self):
        experiment = ExperimentConfig.model_validate(_minimal())
        assert experiment.m == 1
        assert experiment.count == 1000
        assert experiment.quenched and not experiment.annealed
        assert experiment.outputs.json_
        assert experiment.conditions == []

    def test_seed_required(self):
        data = _minimal()
        del data["seed"]
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(data)

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_range(self, seed):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(seed=seed))

    def test_count_positive(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(count=0))

    def test_unknown_field(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(paths=10))

    def test_unknown_condition(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(conditions=["NOPE"]))

    def test_conditions_parsed(self):
        experiment = ExperimentConfig.model_validate(_minimal(conditions=["STRONG", "UI_FMGF"]))
        assert experiment.conditions == [ConditionId.STRONG, ConditionId.UI_FMGF]

    @pytest.mark.parametrize("field, value", [("m_grid", []), ("n_grid", [0]), ("eps_grid", [-0.1]), ("t_grid", [0.0])])
    def test_grids(self, field, value):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(**{field: value}))

    def test_kernel_needs_one_source(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(kernel={"builder": "two_state", "rows": [[1.0]]}))
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(kernel={}))

    def test_missing_kernel_file(self, tmp_path):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(_minimal(kernel={"file": str(tmp_path / "missing.json")}))

    def test_digest_stable(self):
        a = ExperimentConfig.model_validate(_minimal())
        b = ExperimentConfig.model_validate(_minimal())
        c = ExperimentConfig.model_validate(_minimal(seed=43))
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()
        assert len(a.digest()) == 64


class TestBuild:
    def test_builder_kernel(self):
        kernel = ExperimentConfig.model_validate(_minimal()).build_kernel()
        assert np.allclose(kernel.stationary, [0.25, 0.75])

    def test_inline_rows_with_hold(self):
        experiment = ExperimentConfig.model_validate(
            _minimal(kernel={"rows": [[0.0, 1.0], [1.0, 0.0]], "hold": 0.5})
        )
        assert np.allclose(experiment.build_kernel().transition, [[0.5, 0.5], [0.5, 0.5]])

    def test_kernel_file_with_hold(self, tmp_path):
        path = tmp_path / "kernel.json"
        path.write_text(json.dumps({"rows": [[0.7, 0.3], [0.1, 0.9]]}))
        experiment = ExperimentConfig.model_validate(_minimal(kernel={"file": str(path), "hold": 0.5}))
        assert experiment.build_kernel().transition[0, 0] == pytest.approx(0.85)

    def test_inline_observable_not_centered_by_default(self):
        experiment = ExperimentConfig.model_validate(_minimal(observable={"values": [1.0, 0.0]}))
        kernel = experiment.build_kernel()
        assert not experiment.build_observable(kernel).centered

    def test_inline_observable_centered_on_request(self):
        experiment = ExperimentConfig.model_validate(_minimal(observable={"values": [1.0, 0.0], "center": True}))
        kernel = experiment.build_kernel()
        assert np.allclose(experiment.build_observable(kernel).values, [0.75, -0.25])

    def test_observable_length(self):
        experiment = ExperimentConfig.model_validate(_minimal(observable={"values": [1.0, 0.0, 2.0]}))
        with pytest.raises(ExperimentError):
            experiment.build_observable(experiment.build_kernel())

    @pytest.mark.parametrize(
        "spec, expected",
        [
            ({"builder": "indicator", "params": {"state": 1}}, [-0.75, 0.25]),
            ({"builder": "position"}, [-0.75, 0.25]),
            ({"builder": "alternating"}, [1.5, -0.5]),
        ],
    )
    def test_observable_builders(self, spec, expected):
        experiment = ExperimentConfig.model_validate(_minimal(observable=spec))
        values = experiment.build_observable(experiment.build_kernel())
        assert values.centered
        assert np.allclose(values.values, expected)

    def test_indicator_needs_state(self):
        experiment = ExperimentConfig.model_validate(_minimal(observable={"builder": "indicator"}))
        with pytest.raises(ExperimentError):
            experiment.build_observable(experiment.build_kernel())

    def test_start_states(self):
        experiment = ExperimentConfig.model_validate(_minimal())
        kernel = experiment.build_kernel()
        assert experiment.start_states(kernel) == [0, 1]
        assert ExperimentConfig.model_validate(_minimal(starts=[1])).start_states(kernel) == [1]

    def test_runtime_settings(self):
        experiment = ExperimentConfig.model_validate(_minimal(settings={"simulation": {"threads": 3}}))
        assert experiment.runtime_config().simulation.threads == 3


class TestLoadExperiment:
    def test_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            'seed = 7\nconditions = ["STRONG"]\n\n'
            '[kernel]\nbuilder = "two_state"\n\n'
            "[observable]\nvalues = [3.0, -1.0]\n\n"
            "[outputs]\njson = false\n"
        )
        experiment = load_experiment(path)
        assert experiment.seed == 7
        assert not experiment.outputs.json_

    def test_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("seed: 1\nkernel:\n  builder: iid\n  params: {weights: [0.5, 0.5]}\nobservable:\n  builder: alternating\n")
        experiment = load_experiment(path)
        assert experiment.build_kernel().size == 2

    def test_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(_minimal()))
        assert load_experiment(path).seed == 42

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("seed=1")
        with pytest.raises(ExperimentError):
            load_experiment(path)

    def test_parse_error(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("seed = = 1")
        with pytest.raises(ExperimentError):
            load_experiment(path)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ExperimentError):
            load_experiment(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_experiment(tmp_path / "nope.toml")
