"""Model hub: the registry of externally deployed models pipelines draw from.

Each entry records what a model does (task, supported languages) and how to
call it (endpoint plus request template). Entries persist as one JSON file
apiece under the hub directory; an in-memory index is rebuilt on startup.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import DuplicateModelError, InvalidEntryError, NotFoundError, StorageError
from .graph import DataKind, MODEL_PORTS, NodeKind
from .rules import LanguagePair

log = logging.getLogger(__name__)

MODEL_TASKS = ("asr", "mt", "tts", "ocr")


@dataclass(frozen=True)
class RequestTemplate:
    """How to talk to a model API: one POST, one data field each way."""

    method: str = "POST"
    path: str = "/infer"
    payload_field: str = "data"
    response_field: str = "data"

    def validate(self):
        if self.method != "POST":
            raise InvalidEntryError(f"unsupported template method {self.method!r}")
        for name in ("path", "payload_field", "response_field"):
            if not getattr(self, name):
                raise InvalidEntryError(f"request template field {name!r} must be nonempty")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "path": self.path,
            "payload_field": self.payload_field,
            "response_field": self.response_field,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RequestTemplate":
        return cls(
            method=doc.get("method", "POST"),
            path=doc.get("path", "/infer"),
            payload_field=doc.get("payload_field", "data"),
            response_field=doc.get("response_field", "data"),
        )


@dataclass(frozen=True)
class ModelEntry:
    name: str
    version: str
    task: str
    # Language pairs for translation models, plain tags for everything else.
    supported_pairs: tuple = ()
    backend: str = "api"
    endpoint: str = ""
    request_template: RequestTemplate = field(default_factory=RequestTemplate)
    id: Optional[str] = None

    @property
    def input_kind(self) -> DataKind:
        return MODEL_PORTS[NodeKind(self.task)][0]

    @property
    def output_kind(self) -> DataKind:
        return MODEL_PORTS[NodeKind(self.task)][1]

    def supports_pair(self, source_lang: str, target_lang: str) -> bool:
        if self.task != "mt":
            return False
        return any(
            p.source_lang == source_lang and p.target_lang == target_lang
            for p in self.supported_pairs
        )

    def supports_lang(self, lang: str) -> bool:
        if self.task == "mt":
            return False
        return lang in self.supported_pairs

    def validate(self):
        if not self.name or not self.version:
            raise InvalidEntryError("entry needs a nonempty name and version")
        if self.task not in MODEL_TASKS:
            raise InvalidEntryError(f"task must be one of {MODEL_TASKS}, got {self.task!r}")
        if self.backend not in ("api", "repository"):
            raise InvalidEntryError(f"backend must be 'api' or 'repository', got {self.backend!r}")
        if self.backend == "api" and not self.endpoint:
            raise InvalidEntryError("api-backed entry needs an endpoint")
        if not self.supported_pairs:
            raise InvalidEntryError("entry must support at least one language (pair)")
        if self.task == "mt":
            if not all(isinstance(p, LanguagePair) for p in self.supported_pairs):
                raise InvalidEntryError("mt entries list LanguagePair items")
        elif not all(isinstance(p, str) and p for p in self.supported_pairs):
            raise InvalidEntryError(f"{self.task} entries list plain language tags")
        self.request_template.validate()

    def to_dict(self) -> dict:
        if self.task == "mt":
            pairs = [[p.source_lang, p.target_lang] for p in self.supported_pairs]
        else:
            pairs = list(self.supported_pairs)
        return {
            "id": self.id,
            "name": self.name,
            "version": self.version,
            "task": self.task,
            "supported_pairs": pairs,
            "backend": self.backend,
            "endpoint": self.endpoint,
            "request_template": self.request_template.to_dict(),
            "input_kind": self.input_kind.value,
            "output_kind": self.output_kind.value,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelEntry":
        task = doc.get("task", "")
        raw_pairs = doc.get("supported_pairs") or []
        if task == "mt":
            pairs = tuple(LanguagePair(str(p[0]), str(p[1])) for p in raw_pairs)
        else:
            pairs = tuple(str(p) for p in raw_pairs)
        return cls(
            id=doc.get("id"),
            name=str(doc.get("name", "")),
            version=str(doc.get("version", "")),
            task=str(task),
            supported_pairs=pairs,
            backend=str(doc.get("backend", "api")),
            endpoint=str(doc.get("endpoint", "")),
            request_template=RequestTemplate.from_dict(doc.get("request_template") or {}),
        )


class ModelHub:
    """Thread-safe registry. Pass ``directory=None`` for a purely in-memory hub."""

    def __init__(self, directory: str | Path | None = None):
        self._dir = Path(directory) if directory is not None else None
        self._entries: dict[str, ModelEntry] = {}
        self._lock = threading.Lock()
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load()

    def _load(self):
        for path in sorted(self._dir.glob("*.json")):
            try:
                entry = ModelEntry.from_dict(json.loads(path.read_text(encoding="utf-8")))
            except (OSError, ValueError, KeyError) as exc:
                log.warning("skipping unreadable hub entry %s: %s", path, exc)
                continue
            if entry.id:
                self._entries[entry.id] = entry

    def _persist(self, entry: ModelEntry):
        if self._dir is None:
            return
        path = self._dir / f"{entry.id}.json"
        tmp = path.with_suffix(".json.tmp")
        try:
            tmp.write_text(json.dumps(entry.to_dict(), indent=2), encoding="utf-8")
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"could not persist model entry: {exc}") from exc

    def register(self, entry: ModelEntry) -> str:
        """Validate, store, and return the assigned entry id."""
        entry.validate()
        with self._lock:
            for existing in self._entries.values():
                if existing.name == entry.name and existing.version == entry.version:
                    raise DuplicateModelError(
                        f"model {entry.name!r} version {entry.version!r} already registered"
                    )
            assigned = replace(entry, id=entry.id or uuid.uuid4().hex[:12])
            if assigned.id in self._entries:
                raise DuplicateModelError(f"model id {assigned.id!r} already registered")
            self._persist(assigned)
            self._entries[assigned.id] = assigned
            return assigned.id

    def get(self, entry_id: str) -> ModelEntry:
        entry = self._entries.get(entry_id)
        if entry is None:
            raise NotFoundError(f"no model entry with id {entry_id!r}")
        return entry

    def find(self, entry_id: str) -> Optional[ModelEntry]:
        return self._entries.get(entry_id)

    def list(
        self,
        task: str | None = None,
        pair: LanguagePair | None = None,
    ) -> list[ModelEntry]:
        """Entries matching every supplied filter, ordered by (name, version)."""
        entries = list(self._entries.values())
        if task is not None:
            entries = [e for e in entries if e.task == task]
        if pair is not None:
            entries = [e for e in entries if e.supports_pair(pair.source_lang, pair.target_lang)]
        return sorted(entries, key=lambda e: (e.name, e.version))

    def __len__(self) -> int:
        return len(self._entries)
