"""Run manifests: a JSON record of the configuration, input digests, seed and
every warning a pipeline stage emitted, written next to each CLI output so
runs are reproducible and auditable."""

from __future__ import annotations

import datetime
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

PACKAGE_LOGGER = "lscd"


def file_digest(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class _CollectingHandler(logging.Handler):
    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.records: list[dict] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(
            {
                "logger": record.name,
                "level": record.levelname,
                "message": record.getMessage(),
            }
        )


class capture_warnings:
    """Context manager collecting every WARNING+ record emitted under the
    package logger, for inclusion in a manifest."""

    def __init__(self) -> None:
        self._handler = _CollectingHandler()

    def __enter__(self) -> list[dict]:
        logging.getLogger(PACKAGE_LOGGER).addHandler(self._handler)
        return self._handler.records

    def __exit__(self, *exc_info) -> None:
        logging.getLogger(PACKAGE_LOGGER).removeHandler(self._handler)


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, str] = field(default_factory=dict)
    tool_version: str = ""
    seed: int | None = None
    warnings: list[dict] = field(default_factory=list)
    timestamp: str = ""

    def add_inputs(self, paths: Iterable[str | Path]) -> None:
        for path in paths:
            self.inputs[str(path)] = file_digest(path)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "warnings": self.warnings,
            "timestamp": self.timestamp,
        }
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def write(self, out_path: str | Path) -> Path:
        """Write as `<out_path>.manifest.json` and return the manifest path."""
        self.timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        manifest_path = Path(f"{out_path}.manifest.json")
        manifest_path.write_text(self.to_json(), encoding="utf-8")
        return manifest_path
