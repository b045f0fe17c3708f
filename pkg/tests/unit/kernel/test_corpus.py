"""Tests for the corpus chains and the kernel loader."""

import json

import numpy as np
import pytest

from quenched_clt.kernel import KernelError, KernelLoader, NotErgodic, check_reversible, load_kernel
from quenched_clt.kernel.corpus import (
    biased_cycle,
    from_builder,
    iid,
    lazy_two_cycle,
    small_corpus,
    star,
    triangle,
)


class TestCorpus:
    def test_iid_rows_equal_pi(self):
        kernel = iid([2.0, 3.0, 5.0])
        assert np.allclose(kernel.stationary, [0.2, 0.3, 0.5])
        assert np.allclose(kernel.transition, np.tile(kernel.stationary, (3, 1)))

    def test_biased_cycle_uniform_pi(self):
        kernel = biased_cycle(5, 0.7)
        assert np.allclose(kernel.stationary, 0.2)

    def test_even_biased_cycle_is_periodic(self):
        with pytest.raises(NotErgodic):
            biased_cycle(4)

    def test_biased_cycle_needs_three_states(self):
        with pytest.raises(KernelError):
            biased_cycle(2)

    def test_lazy_two_cycle(self):
        kernel = lazy_two_cycle(0.25)
        assert np.allclose(kernel.transition, [[0.25, 0.75], [0.75, 0.25]])

    def test_star_hub_mass(self):
        kernel = star(leaves=3, hold=0.5)
        assert kernel.stationary[0] == pytest.approx(0.5)
        assert np.allclose(kernel.stationary[1:], 1 / 6)

    def test_triangle_uniform_and_reversible(self):
        kernel = triangle()
        assert np.allclose(kernel.stationary, 1 / 3)
        assert check_reversible(kernel).reversible

    def test_small_corpus_sizes(self):
        corpus = small_corpus()
        assert all(kernel.size <= 4 for kernel in corpus.values())
        assert "two_state" in corpus

    def test_unknown_builder(self):
        with pytest.raises(KernelError):
            from_builder("nope")


class TestKernelLoader:
    def test_inline_yaml(self, tmp_path):
        path = tmp_path / "chain.yaml"
        path.write_text("states: [a, b]\nrows:\n  - [0.7, 0.3]\n  - [0.1, 0.9]\n")
        kernel = load_kernel(path)
        assert kernel.states == ("a", "b")
        assert np.allclose(kernel.stationary, [0.25, 0.75])

    def test_builder_json(self, tmp_path):
        path = tmp_path / "chain.json"
        path.write_text(json.dumps({"builder": "two_state", "params": {"p": 0.3, "q": 0.1}}))
        kernel = load_kernel(path)
        assert kernel.transition[0, 1] == pytest.approx(0.3)

    def test_hold(self):
        kernel = KernelLoader().load_dict({"builder": "two_state", "hold": 0.5})
        assert kernel.transition[0, 0] == pytest.approx(0.85)

    def test_periodic_file(self, tmp_path):
        path = tmp_path / "cycle.yaml"
        path.write_text("rows:\n  - [0, 1]\n  - [1, 0]\n")
        with pytest.raises(NotErgodic):
            load_kernel(path)

    def test_periodic_rows_made_lazy(self):
        kernel = KernelLoader().load_dict({"states": ["a", "b"], "rows": [[0, 1], [1, 0]], "hold": 0.25})
        assert kernel.states == ("a", "b")
        assert np.allclose(kernel.transition, [[0.25, 0.75], [0.75, 0.25]])

    def test_hold_argument_overrides_file(self, tmp_path):
        path = tmp_path / "cycle.yaml"
        path.write_text("rows:\n  - [0, 1]\n  - [1, 0]\n")
        kernel = KernelLoader().load_file(path, hold=0.5)
        assert np.allclose(kernel.stationary, [0.5, 0.5])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_kernel(tmp_path / "missing.yaml")

    def test_needs_rows_or_builder(self):
        with pytest.raises(KernelError):
            KernelLoader().load_dict({"states": [0, 1]})

    def test_non_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(KernelError):
            load_kernel(path)

    @pytest.mark.parametrize("hold", [1.0, -0.1])
    def test_hold_out_of_range(self, hold):
        with pytest.raises(ValueError):
            KernelLoader().load_dict({"rows": [[0, 1], [1, 0]], "hold": hold})
