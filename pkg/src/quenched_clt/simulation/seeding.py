"""Counter-based seeding - one independent Philox stream per (master seed, path)."""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .types import SimulationError


SEED_DOMAIN = b"quenched-clt/path-stream/v1"

# Streams derived for one path
TRANSITION_STREAM = 0
START_STREAM = 1

MAX_SEED = 2**64


def path_key(master_seed: int, path_index: int, stream: int = TRANSITION_STREAM) -> int:
    """
    128-bit Philox key = first 16 bytes of
    SHA-256(domain || u64le(master_seed) || u64le(path_index) || u64le(stream)).
    """
    if not 0 <= master_seed < MAX_SEED:
        raise SimulationError(f"Master seed must be an unsigned 64-bit integer, got {master_seed}")
    if path_index < 0 or stream < 0:
        raise SimulationError(f"Path index and stream must be nonnegative, got {path_index}, {stream}")
    payload = SEED_DOMAIN + struct.pack("<QQQ", master_seed, path_index, stream)
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:16], "little")


def path_generator(master_seed: int, path_index: int, stream: int = TRANSITION_STREAM) -> np.random.Generator:
    """Generator for one path's stream; independent of any other path or schedule."""
    return np.random.Generator(np.random.Philox(key=path_key(master_seed, path_index, stream)))


def open_uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniforms on (0, 1], so a draw of exactly 0 never selects a zero-probability column."""
    return 1.0 - rng.random(size)
