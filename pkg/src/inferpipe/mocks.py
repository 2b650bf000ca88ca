"""Deterministic stand-in model servers for benchmarks and tests.

One server handles every task kind behind paths like ``/mt/en-hi/infer`` or
``/asr/en/infer``, sleeping a configurable latency before answering. The
transforms are fixed and invertible where it matters: the speech synthesis
mock embeds its input text in the audio bytes and the recognition mock
recovers it, so a synth→recognize chain is the identity on text.
"""

from __future__ import annotations

import base64
import json
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

TTS_AUDIO_PREFIX = b"TTSAUDIO:"
OCR_FIXED_TEXT = "scanned text"

_EXPECTED_INPUT_KIND = {"asr": "audio", "mt": "text", "tts": "text", "ocr": "image"}


@dataclass(frozen=True)
class MockSpec:
    """One server to launch: which task it serves, how slow, and where."""

    task: Optional[str] = None  # None serves every task
    latency_ms: float = 0.0
    port: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "MockSpec":
        return cls(
            task=doc.get("task"),
            latency_ms=float(doc.get("latency_ms", 0.0)),
            port=int(doc.get("port", 0)),
        )


def mock_response(task: str, langspec: str, data: str) -> tuple[str, dict]:
    """The contract transform: (response data, response metadata)."""
    if task == "mt":
        src, _, tgt = langspec.partition("-")
        return f"MT({src}->{tgt}): {data}", {"lang": tgt}
    if task == "tts":
        audio = base64.b64encode(TTS_AUDIO_PREFIX + data.encode("utf-8")).decode("ascii")
        return audio, {"format": "wav", "lang": langspec}
    if task == "asr":
        raw = base64.b64decode(data, validate=True)
        if raw.startswith(TTS_AUDIO_PREFIX):
            return raw[len(TTS_AUDIO_PREFIX):].decode("utf-8"), {"lang": langspec}
        return f"ASR({langspec}): {len(raw)}", {"lang": langspec}
    if task == "ocr":
        base64.b64decode(data, validate=True)  # must be a real image payload
        return f"OCR({langspec}): {OCR_FIXED_TEXT}", {"lang": langspec}
    raise ValueError(f"unknown task {task!r}")


class _MockHandler(BaseHTTPRequestHandler):
    def _reply(self, status: int, doc: dict):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/health":
            self._reply(200, {"status": "ok", "task": self.server.task or "all"})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        parts = [p for p in self.path.split("/") if p]
        if len(parts) != 3 or parts[2] != "infer":
            self._reply(404, {"error": f"unknown path {self.path!r}"})
            return
        task, langspec = parts[0], parts[1]
        if task not in _EXPECTED_INPUT_KIND:
            self._reply(404, {"error": f"unknown task {task!r}"})
            return
        if self.server.task is not None and task != self.server.task:
            self._reply(404, {"error": f"this server only serves {self.server.task!r}"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            doc = json.loads(self.rfile.read(length))
            data = doc["data"]
            metadata = doc.get("metadata") or {}
            if not isinstance(data, str):
                raise ValueError("data must be a string")
        except (ValueError, KeyError) as exc:
            self._reply(400, {"error": f"bad request body: {exc}"})
            return
        declared = metadata.get("kind")
        if declared is not None and declared != _EXPECTED_INPUT_KIND[task]:
            self._reply(
                400,
                {"error": f"{task} takes {_EXPECTED_INPUT_KIND[task]}, got {declared}"},
            )
            return
        if self.server.latency_ms > 0:
            time.sleep(self.server.latency_ms / 1000.0)
        try:
            out, out_metadata = mock_response(task, langspec, data)
        except (ValueError, TypeError) as exc:
            self._reply(400, {"error": f"undecodable payload: {exc}"})
            return
        self._reply(200, {"data": out, "metadata": out_metadata})

    def log_message(self, fmt, *args):
        pass


class _MockServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, spec: MockSpec):
        super().__init__(("127.0.0.1", spec.port), _MockHandler)
        self.task = spec.task
        self.latency_ms = spec.latency_ms


class MockModelServer:
    """In-process mock server; use as a context manager in tests and benches."""

    def __init__(self, latency_ms: float = 0.0, port: int = 0, task: str | None = None):
        self._server = _MockServer(MockSpec(task=task, latency_ms=latency_ms, port=port))
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def endpoint_for(self, task: str, langspec: str) -> str:
        """Hub-ready endpoint; the request template appends ``/infer``."""
        return f"{self.base_url}/{task}/{langspec}"

    def start(self) -> "MockModelServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "MockModelServer":
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()


def serve_mocks(specs: list[MockSpec]) -> list[MockModelServer]:
    """Start one server per spec; caller is responsible for stopping them."""
    servers = []
    for spec in specs:
        server = MockModelServer(latency_ms=spec.latency_ms, port=spec.port, task=spec.task)
        servers.append(server.start())
    return servers
