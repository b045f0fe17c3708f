"""
Experiment configuration - validated description of one reproducible run.

Experiment files are TOML (YAML and JSON are accepted too):

    seed = 42
    conditions = ["UI_FMGF", "STRONG", "COBOUNDARY"]

    [kernel]
    builder = "two_state"
    params = {p = 0.3, q = 0.1}

    [observable]
    values = [3.0, -1.0]

    [settings.simulation]
    threads = 4
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._toml import tomllib
from .config import Config
from .diagnostics.conditions import DEFAULT_LEVELS, DEFAULT_M_GRID
from .diagnostics.types import ConditionId
from .kernel.loader import KernelLoader
from .kernel.types import MarkovKernel
from .operators.calculus import center, observable
from .operators.types import Observable
from .simulation.seeding import MAX_SEED
from .simulation.types import DEFAULT_GRID


logger = logging.getLogger(__name__)

CheckName = Literal[
    "clt", "fclt", "mixture", "rio", "maximal", "martingale_average", "transition_frequency",
]


class ExperimentError(Exception):
    """Raised when an experiment file cannot be read or resolved."""
    pass


class KernelSource(BaseModel):
    """Exactly one of inline rows, a kernel file or a corpus builder."""
    model_config = ConfigDict(extra="forbid")

    rows: list[list[float]] | None = None
    states: list[Any] | None = None
    stationary: list[float] | None = None
    file: str | None = None
    builder: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    hold: float | None = Field(default=None, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _one_source(self) -> KernelSource:
        given = [name for name in ("rows", "file", "builder") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"kernel needs exactly one of rows, file or builder (got {given or 'none'})")
        if self.file is not None and not Path(self.file).is_file():
            raise ValueError(f"kernel file does not exist: {self.file}")
        return self


class ObservableSpec(BaseModel):
    """
    Inline values, or a named builder:

    indicator   1_{state} (params: state)
    position    f(x) = position of x
    alternating f(x) = (-1)^position

    Builder outputs are always centered under pi; inline values only when
    `center` is set.
    """
    model_config = ConfigDict(extra="forbid")

    values: list[float] | None = None
    builder: Literal["indicator", "position", "alternating"] | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    center: bool = False

    @model_validator(mode="after")
    def _one_source(self) -> ObservableSpec:
        if (self.values is None) == (self.builder is None):
            raise ValueError("observable needs exactly one of values or builder")
        return self


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    dir: str = "out"
    csv: bool = True
    json_: bool = Field(default=True, alias="json")


class ExperimentConfig(BaseModel):
    """One run: chain, observable, grids, counts, seed, requested conditions and outputs."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kernel: KernelSource
    observable: ObservableSpec
    seed: int = Field(ge=0, lt=MAX_SEED)
    m: int = Field(default=1, ge=1)
    m_grid: list[int] = Field(default_factory=lambda: list(DEFAULT_M_GRID))
    n_grid: list[int] = Field(default_factory=lambda: [1000])
    eps_grid: list[float] = Field(default_factory=lambda: [0.1])
    level_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_LEVELS))
    t_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_GRID))
    count: int = Field(default=1000, ge=1)
    starts: list[Any] | None = None
    quenched: bool = True
    annealed: bool = False
    j_max: int | None = Field(default=None, ge=1)
    conditions: list[ConditionId] = Field(default_factory=list)
    checks: list[CheckName] = Field(default_factory=list)
    outputs: OutputSpec = Field(default_factory=OutputSpec)
    settings: dict[str, Any] = Field(default_factory=dict)

    @field_validator("m_grid", "n_grid")
    @classmethod
    def _positive_grid(cls, values: list[int]) -> list[int]:
        if not values:
            raise ValueError("grid must be nonempty")
        if any(v < 1 for v in values):
            raise ValueError(f"grid entries must be >= 1, got {values}")
        return values

    @field_validator("eps_grid", "level_grid")
    @classmethod
    def _positive_reals(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("grid must be nonempty")
        if any(v <= 0 for v in values):
            raise ValueError(f"grid entries must be > 0, got {values}")
        return values

    @field_validator("t_grid")
    @classmethod
    def _unit_grid(cls, values: list[float]) -> list[float]:
        if not values or any(not 0.0 < t <= 1.0 for t in values):
            raise ValueError(f"t_grid must be nonempty with entries in (0, 1], got {values}")
        return values

    def runtime_config(self) -> Config:
        """Runtime knobs from the [settings] table."""
        return Config.from_dict(self.settings)

    def digest(self) -> str:
        """SHA-256 over the canonical JSON form of the validated config."""
        canonical = json.dumps(
            self.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def build_kernel(self) -> MarkovKernel:
        loader = KernelLoader(tolerance=self.runtime_config().tolerances.row_sum)
        source = self.kernel
        if source.file is not None:
            return loader.load_file(source.file, hold=source.hold)
        return loader.load_dict(source.model_dump(exclude_none=True))

    def build_observable(self, kernel: MarkovKernel) -> Observable:
        spec = self.observable
        if spec.values is not None:
            if len(spec.values) != kernel.size:
                raise ExperimentError(
                    f"observable has {len(spec.values)} values for a {kernel.size}-state kernel"
                )
            raw = observable(spec.values, kernel)
            return center(raw, kernel) if spec.center else raw

        positions = np.arange(kernel.size, dtype=float)
        if spec.builder == "indicator":
            if "state" not in spec.params:
                raise ExperimentError("indicator observable needs params.state")
            values = (positions == kernel.resolve(spec.params["state"])).astype(float)
        elif spec.builder == "position":
            values = positions
        else:
            values = np.where(positions % 2 == 0, 1.0, -1.0)
        return center(values, kernel)

    def start_states(self, kernel: MarkovKernel) -> list[Any]:
        if self.starts is None:
            return list(kernel.states)
        for x in self.starts:
            kernel.resolve(x)
        return list(self.starts)


def load_experiment(path: str | Path) -> ExperimentConfig:
    """
    Read and validate an experiment file (.toml, .yaml/.yml or .json).

    Raises:
        OSError: If the file cannot be read
        ExperimentError: If it does not parse
        pydantic.ValidationError: If it parses but is invalid
    """
    path = Path(path)
    raw = path.read_bytes()
    try:
        if path.suffix == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        elif path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(raw)
        elif path.suffix == ".json":
            data = json.loads(raw)
        else:
            raise ExperimentError(f"Unsupported experiment format: {path.suffix or '(none)'}")
    except (tomllib.TOMLDecodeError, yaml.YAMLError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ExperimentError(f"Cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ExperimentError(f"Experiment file {path} must hold a mapping")
    experiment = ExperimentConfig.model_validate(data)
    logger.info(f"Loaded experiment from {path} (digest {experiment.digest()[:12]})")
    return experiment
