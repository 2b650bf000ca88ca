"""Pipeline repository: persists validated pipelines and their endpoints.

Saving a pipeline mints its URL-safe endpoint id; the listing backs the
catalog of saved pipelines the gateway and UI expose.
"""

from __future__ import annotations

import json
import logging
import os
import secrets
import string
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import InvalidPipelineError, NotFoundError, StorageError
from .graph import PipelineGraph, validate_pipeline
from .rules import RuleSet

log = logging.getLogger(__name__)

_TOKEN_ALPHABET = string.ascii_lowercase + string.digits
_TOKEN_LENGTH = 12


def _new_endpoint_id() -> str:
    return "".join(secrets.choice(_TOKEN_ALPHABET) for _ in range(_TOKEN_LENGTH))


@dataclass(frozen=True)
class SavedPipeline:
    endpoint_id: str
    pipeline: PipelineGraph
    description: str
    created_at: str  # ISO 8601 UTC

    def to_dict(self) -> dict:
        return {
            "endpoint_id": self.endpoint_id,
            "description": self.description,
            "created_at": self.created_at,
            "pipeline": self.pipeline.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SavedPipeline":
        return cls(
            endpoint_id=str(doc["endpoint_id"]),
            pipeline=PipelineGraph.from_dict(doc["pipeline"]),
            description=str(doc.get("description", "")),
            created_at=str(doc.get("created_at", "")),
        )


class PipelineRepository:
    """One JSON document per saved pipeline under ``directory``."""

    def __init__(self, directory: str | Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._records: dict[str, SavedPipeline] = {}
        self._load()

    def _load(self):
        for path in sorted(self._dir.glob("*.json")):
            try:
                record = SavedPipeline.from_dict(json.loads(path.read_text(encoding="utf-8")))
            except (OSError, ValueError, KeyError) as exc:
                log.warning("skipping unreadable pipeline document %s: %s", path, exc)
                continue
            self._records[record.endpoint_id] = record

    def save(self, pipeline: PipelineGraph, description: str, rules: RuleSet) -> str:
        """Validate, persist, and return the generated endpoint id."""
        report = validate_pipeline(pipeline, rules)
        if not report.ok:
            raise InvalidPipelineError(
                f"pipeline {pipeline.id!r} fails validation: {report.codes()}", report=report
            )
        with self._lock:
            endpoint_id = _new_endpoint_id()
            while endpoint_id in self._records:
                endpoint_id = _new_endpoint_id()
            record = SavedPipeline(
                endpoint_id=endpoint_id,
                pipeline=pipeline,
                description=description,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            path = self._dir / f"{endpoint_id}.json"
            tmp = path.with_suffix(".json.tmp")
            try:
                tmp.write_text(json.dumps(record.to_dict(), indent=2), encoding="utf-8")
                os.replace(tmp, path)
            except OSError as exc:
                raise StorageError(f"could not persist pipeline: {exc}") from exc
            self._records[endpoint_id] = record
            return endpoint_id

    def load(self, endpoint_id: str) -> SavedPipeline:
        record = self._records.get(endpoint_id)
        if record is None:
            raise NotFoundError(f"no saved pipeline with endpoint id {endpoint_id!r}")
        return record

    def list(self) -> list[dict]:
        """One summary per saved pipeline, newest first."""
        records = sorted(
            self._records.values(),
            key=lambda r: (r.created_at, r.endpoint_id),
            reverse=True,
        )
        return [
            {
                "endpoint_id": r.endpoint_id,
                "name": r.pipeline.name,
                "description": r.description,
                "created_at": r.created_at,
                "node_count": len(r.pipeline.nodes),
            }
            for r in records
        ]

    def __len__(self) -> int:
        return len(self._records)
