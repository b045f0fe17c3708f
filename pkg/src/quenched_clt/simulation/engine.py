"""Chain engine - inverse-CDF transitions and blockwise path statistics."""

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from ..kernel.types import MarkovKernel
from .seeding import START_STREAM, open_uniforms, path_generator


logger = logging.getLogger(__name__)

# Above this many states the per-state searchsorted beats a dense comparison
VECTOR_COMPARE_LIMIT = 32


def _cumulative_rows(table: np.ndarray) -> np.ndarray:
    """Row-wise CDFs with every entry from the last positive column on forced to 1."""
    table = np.atleast_2d(np.asarray(table, dtype=float))
    cdf = np.cumsum(table, axis=1)
    size = table.shape[1]
    last_positive = size - 1 - np.argmax(table[:, ::-1] > 0, axis=1)
    cdf[np.arange(size)[None, :] >= last_positive[:, None]] = 1.0
    return cdf


def grid_steps(n: int, grid: tuple[float, ...]) -> np.ndarray:
    """[n t] for each grid time; the 1e-9 nudge absorbs products like 0.29 * 100 = 28.999999999999996."""
    steps = np.floor(np.asarray(grid, dtype=float) * n + 1e-9).astype(np.int64)
    return np.clip(steps, 0, n)


@dataclass
class BatchStatistics:
    """Raw per-path statistics for one batch, in the batch's path order."""
    endpoints: np.ndarray
    grid_values: np.ndarray
    max_abs: np.ndarray
    max_signed: np.ndarray
    max_abs_rbar: np.ndarray
    rbar_endpoints: np.ndarray
    starts: np.ndarray


class ChainEngine:
    """
    Samples transitions of one kernel by inverse CDF.

    Given u in (0, 1], the next state from x is the number of entries of the
    cumulative row cdf[x] strictly below u, so ties at a boundary go to the
    lower index. The dense comparison and the searchsorted path give the
    same answer for the same u.
    """

    def __init__(self, kernel: MarkovKernel):
        self.kernel = kernel
        self.size = kernel.size
        self.cdf = _cumulative_rows(kernel.transition)
        self.start_cdf = _cumulative_rows(kernel.stationary)[0]
        self._rows = [row.tolist() for row in self.cdf]
        self._start_row = self.start_cdf.tolist()

    def next_states(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        """One vectorized step for a batch of paths."""
        if self.size <= VECTOR_COMPARE_LIMIT:
            return (self.cdf[states] < u[:, None]).sum(axis=1)
        out = np.empty_like(states)
        for s in np.unique(states):
            mask = states == s
            out[mask] = np.searchsorted(self.cdf[s], u[mask], side="left")
        return out

    def walk(self, start: int, uniforms: np.ndarray) -> np.ndarray:
        """Sequential states xi_1, xi_2, ... of one path from its uniforms."""
        rows = self._rows
        out = np.empty(uniforms.shape[0], dtype=np.int64)
        x = int(start)
        for i, u in enumerate(uniforms.tolist()):
            x = bisect_left(rows[x], u)
            out[i] = x
        return out

    def draw_start(self, master_seed: int, path_index: int) -> int:
        """Start state from pi on the path's dedicated start stream."""
        rng = path_generator(master_seed, path_index, START_STREAM)
        return bisect_left(self._start_row, float(open_uniforms(rng, 1)[0]))

    def run_batch(
        self,
        starts: np.ndarray,
        path_indices: np.ndarray,
        master_seed: int,
        n: int,
        f_values: np.ndarray,
        fm_values: np.ndarray,
        steps: np.ndarray,
        block_length: int,
    ) -> BatchStatistics:
        """
        Advance a batch of paths n steps in time blocks, keeping only statistics.

        Each path draws from its own stream, and partial sums are accumulated
        sequentially, so the numbers do not depend on the batch or block sizes.
        """
        batch = starts.shape[0]
        rngs = [path_generator(master_seed, int(i)) for i in path_indices]
        state = starts.astype(np.int64).copy()

        s_total = np.zeros(batch)
        r_total = np.zeros(batch)
        max_abs = np.zeros(batch)
        max_signed = np.full(batch, -np.inf)
        max_abs_rbar = np.zeros(batch)
        grid_values = np.zeros((batch, steps.shape[0]))

        done = 0
        while done < n:
            length = min(block_length, n - done)
            uniforms = np.stack([open_uniforms(rng, length) for rng in rngs])
            if batch == 1:
                block = self.walk(int(state[0]), uniforms[0])[None, :]
            else:
                block = np.empty((batch, length), dtype=np.int64)
                for t in range(length):
                    state = self.next_states(state, uniforms[:, t])
                    block[:, t] = state

            sums = np.cumsum(np.concatenate([s_total[:, None], f_values[block]], axis=1), axis=1)[:, 1:]
            rbar = np.cumsum(np.concatenate([r_total[:, None], fm_values[block]], axis=1), axis=1)[:, 1:]

            np.maximum(max_abs, np.abs(sums).max(axis=1), out=max_abs)
            np.maximum(max_signed, sums.max(axis=1), out=max_signed)
            np.maximum(max_abs_rbar, np.abs(rbar).max(axis=1), out=max_abs_rbar)
            in_block = (steps > done) & (steps <= done + length)
            for gi in np.flatnonzero(in_block):
                grid_values[:, gi] = sums[:, steps[gi] - done - 1]

            s_total = sums[:, -1]
            r_total = rbar[:, -1]
            state = block[:, -1]
            done += length

        return BatchStatistics(
            endpoints=s_total,
            grid_values=grid_values,
            max_abs=max_abs,
            max_signed=max_signed,
            max_abs_rbar=max_abs_rbar,
            rbar_endpoints=np.abs(r_total),
            starts=starts,
        )
