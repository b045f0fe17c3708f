"""Logging wiring for the command-line entry point."""

from __future__ import annotations

import logging

from .config import LoggingConfig


def setup_logging(config: LoggingConfig | None = None, level: str | None = None) -> None:
    """Configure the root logger; an explicit level wins over the config."""
    config = config or LoggingConfig()
    name = (level or config.level).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format=config.format,
        force=True,
    )