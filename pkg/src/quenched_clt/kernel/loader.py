"""Kernel loader - loads kernel definitions from JSON/YAML files."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .builder import ROW_SUM_TOLERANCE, build_kernel, lazy, validate_rows
from .corpus import from_builder
from .types import KernelError, MarkovKernel


logger = logging.getLogger(__name__)


class KernelLoader:
    """
    Loads kernels from JSON or YAML files.

    Inline format:
    ```json
    {"states": ["a", "b"], "rows": [[0.7, 0.3], [0.1, 0.9]]}
    ```

    Builder format (see `corpus.BUILDERS`):
    ```yaml
    builder: two_state
    params: {p: 0.3, q: 0.1}
    ```

    Either form accepts an optional `hold` to make the result lazy.
    """

    def __init__(self, tolerance: float = ROW_SUM_TOLERANCE):
        self.tolerance = tolerance

    def load_file(self, path: str | Path, hold: float | None = None) -> MarkovKernel:
        """Load a kernel from a YAML or JSON file; `hold` overrides the file's own."""
        path = Path(path)

        if not path.exists():
            raise FileNotFoundError(f"Kernel file not found: {path}")

        with open(path, "r", encoding="utf-8") as f:
            if path.suffix in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)

        if not isinstance(data, dict):
            raise KernelError(f"Kernel file {path} must hold a mapping")
        if hold is not None:
            data = {**data, "hold": hold}
        kernel = self.load_dict(data)
        logger.info(f"Loaded {kernel.size}-state kernel from {path}")
        return kernel

    def load_dict(self, data: dict[str, Any]) -> MarkovKernel:
        """Load a kernel from a dictionary."""
        hold = data.get("hold")
        if hold is not None and not 0.0 <= float(hold) < 1.0:
            raise ValueError(f"hold must lie in [0, 1), got {hold}")
        if "builder" in data:
            kernel = from_builder(data["builder"], data.get("params"))
            return lazy(kernel, float(hold)) if hold else kernel
        if "rows" not in data:
            raise KernelError("Kernel definition needs either 'rows' or 'builder'")

        # hold is applied to the raw rows so periodic tables can be made lazy
        rows = validate_rows(data["rows"], self.tolerance)
        if hold:
            rows = float(hold) * np.eye(rows.shape[0]) + (1.0 - float(hold)) * rows
        return build_kernel(
            rows,
            states=data.get("states"),
            stationary=data.get("stationary"),
            tolerance=self.tolerance,
        )


def load_kernel(path: str | Path) -> MarkovKernel:
    """Convenience function to load a kernel file."""
    return KernelLoader().load_file(path)
