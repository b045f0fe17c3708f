"""Tests for per-path stream derivation."""

import numpy as np
import pytest

from quenched_clt.simulation import SimulationError, path_generator, path_key
from quenched_clt.simulation.seeding import MAX_SEED, START_STREAM, open_uniforms


class TestPathKey:
    def test_deterministic(self):
        assert path_key(42, 7) == path_key(42, 7)

    def test_fits_in_128_bits(self):
        assert 0 <= path_key(2**64 - 1, 10**6) < 2**128

    def test_distinct_per_index_and_stream(self):
        keys = {path_key(42, i, s) for i in range(50) for s in (0, START_STREAM)}
        assert len(keys) == 100

    def test_master_seed_matters(self):
        assert path_key(1, 0) != path_key(2, 0)

    @pytest.mark.parametrize("seed", [-1, MAX_SEED])
    def test_seed_range(self, seed):
        with pytest.raises(SimulationError):
            path_key(seed, 0)

    def test_negative_index(self):
        with pytest.raises(SimulationError):
            path_key(0, -1)


class TestPathGenerator:
    def test_reproducible(self):
        a = path_generator(9, 3).random(5)
        b = path_generator(9, 3).random(5)
        assert np.array_equal(a, b)

    def test_split_draws_match_one_draw(self):
        rng = path_generator(9, 3)
        pieces = np.concatenate([rng.random(4), rng.random(9)])
        assert np.array_equal(pieces, path_generator(9, 3).random(13))

    def test_open_uniforms_exclude_zero(self):
        u = open_uniforms(path_generator(0, 0), 10_000)
        assert np.all(u > 0.0)
        assert np.all(u <= 1.0)
