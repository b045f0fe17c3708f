"""Run manifest - config digest, version, step timings and verdicts of one CLI run."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from . import __version__


@dataclass
class RunManifest:
    """Written to <out>/manifest.json at the end of every run."""
    command: str
    config_digest: str = ""
    seed: int | None = None
    version: str = __version__
    timings: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    exit_code: int = 0

    @contextmanager
    def step(self, name: str) -> Iterator[None]:
        """Time a named step; repeated names accumulate."""
        began = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - began

    def record_output(self, path: str | Path) -> None:
        self.outputs.append(str(path))

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "version": self.version,
            "timings": dict(self.timings),
            "verdicts": dict(self.verdicts),
            "outputs": list(self.outputs),
            "exit_code": self.exit_code,
        }

    def write(self, directory: str | Path) -> Path:
        path = Path(directory) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        return path
