"""Configuration for quenched CLT runs."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any


THREADS_ENV_VAR = "QCLT_THREADS"


@dataclass
class SimulationConfig:
    """Monte Carlo engine configuration."""
    threads: int = 1
    batch_size: int = 1000           # Paths advanced together in one vectorized walk
    block_length: int = 4096         # Time steps drawn per uniform block
    memory_cap_values: int = 8_000_000  # Max floats held per batch (batch_size x block_length)


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by the exact evaluators."""
    row_sum: float = 1e-9            # Accepted row-sum error on input kernels
    variance_series: float = 1e-10   # Certified tail for sigma^2
    variance_clamp: float = 1e-9     # Negative sigma^2 above -clamp is set to 0
    ks_bias_allowance: float = 0.005  # Added to every KS critical value
    ks_finite_n: float = 0.75        # c in the extra c / sqrt(steps) KS and sup allowance


@dataclass
class VerdictConfig:
    """Policy knobs for turning finite-sample numbers into verdicts."""
    fail_on_any_state: bool = True    # A single failing start state fails the run
    allow_inconclusive: bool = False  # Treat "inconclusive" as success in the CLI


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"
    format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class Config:
    """Main configuration container."""
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    verdicts: VerdictConfig = field(default_factory=VerdictConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Config:
        """Create config from dictionary."""
        return cls(
            simulation=SimulationConfig(**data.get("simulation", {})),
            tolerances=ToleranceConfig(**data.get("tolerances", {})),
            verdicts=VerdictConfig(**data.get("verdicts", {})),
            logging=LoggingConfig(**data.get("logging", {})),
        )

    @classmethod
    def from_yaml(cls, path: str) -> Config:
        """Load config from YAML file."""
        import yaml
        with open(path, "r") as f:
            data = yaml.safe_load(f)
        return cls.from_dict(data or {})

    @classmethod
    def from_toml(cls, path: str) -> Config:
        """Load config from TOML file."""
        from ._toml import tomllib
        with open(path, "rb") as f:
            data = tomllib.load(f)
        return cls.from_dict(data)

    @classmethod
    def from_json(cls, path: str) -> Config:
        """Load config from JSON file."""
        import json
        with open(path, "r") as f:
            data = json.load(f)
        return cls.from_dict(data)

    def resolve_threads(self, override: int | None = None) -> int:
        """Worker count: explicit override, then QCLT_THREADS, then the config value."""
        if override is not None:
            return max(1, override)
        env_value = os.environ.get(THREADS_ENV_VAR)
        if env_value:
            try:
                return max(1, int(env_value))
            except ValueError:
                pass
        return max(1, self.simulation.threads)
