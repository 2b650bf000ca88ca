from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from inferpipe import (
    LanguagePair,
    MockModelServer,
    ModelEntry,
    ModelHub,
    Node,
    NodeKind,
    PipelineGraph,
    bhashini_ruleset,
)


@pytest.fixture(scope="session")
def mock_server():
    with MockModelServer(latency_ms=0) as server:
        yield server


@pytest.fixture
def hub():
    return ModelHub()


@pytest.fixture
def seeded_hub(hub, mock_server):
    """Hub with one mock model per task, English-centric."""
    entries = {
        "mt_en_hi": ModelEntry(
            name="mock-mt-en-hi",
            version="1.0",
            task="mt",
            supported_pairs=(LanguagePair("en", "hi"),),
            backend="api",
            endpoint=mock_server.endpoint_for("mt", "en-hi"),
        ),
        "mt_hi_en": ModelEntry(
            name="mock-mt-hi-en",
            version="1.0",
            task="mt",
            supported_pairs=(LanguagePair("hi", "en"),),
            backend="api",
            endpoint=mock_server.endpoint_for("mt", "hi-en"),
        ),
        "asr_en": ModelEntry(
            name="mock-asr",
            version="1.0",
            task="asr",
            supported_pairs=("en",),
            backend="api",
            endpoint=mock_server.endpoint_for("asr", "en"),
        ),
        "tts_en": ModelEntry(
            name="mock-tts",
            version="1.0",
            task="tts",
            supported_pairs=("en",),
            backend="api",
            endpoint=mock_server.endpoint_for("tts", "en"),
        ),
        "ocr_en": ModelEntry(
            name="mock-ocr",
            version="1.0",
            task="ocr",
            supported_pairs=("en",),
            backend="api",
            endpoint=mock_server.endpoint_for("ocr", "en"),
        ),
    }
    ids = {key: hub.register(entry) for key, entry in entries.items()}
    return hub, ids


@pytest.fixture
def rules(seeded_hub):
    hub, _ = seeded_hub
    return bhashini_ruleset(model_lookup=hub.find)


def build_mt_pipeline(hub_ids, rules, *, name="en-hi translation") -> PipelineGraph:
    """input(text) -> mt(en->hi) -> output, the smallest useful chain."""
    p = PipelineGraph(id="p-mt", name=name)
    p = p.add_node(
        Node(id="in", kind=NodeKind.INPUT,
             properties={"data_kind": "text", "source": "upload", "lang": "en"})
    )
    p = p.add_node(
        Node(id="mt1", kind=NodeKind.MT,
             properties={"source_lang": "en", "target_lang": "hi"},
             model_ref=hub_ids["mt_en_hi"])
    )
    p = p.add_node(Node(id="out", kind=NodeKind.OUTPUT))
    p = p.add_edge("in", "mt1", rules)
    p = p.add_edge("mt1", "out", rules)
    return p


@pytest.fixture
def mt_pipeline(seeded_hub, rules):
    _, ids = seeded_hub
    return build_mt_pipeline(ids, rules)


class _CannedHandler(BaseHTTPRequestHandler):
    status = 200
    body: bytes = b"{}"

    def do_POST(self):  # noqa: N802
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        if self.server.drop_first and not self.server.dropped:  # type: ignore[attr-defined]
            self.server.dropped = True  # type: ignore[attr-defined]
            self.connection.close()
            return
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(self.body)))
        self.end_headers()
        self.wfile.write(self.body)

    def log_message(self, *args):
        pass


@pytest.fixture
def canned_server():
    """Factory for throwaway HTTP servers with a fixed status/body.

    drop_first=True makes the server sever the first connection without a
    response, to exercise the transport retry.
    """
    servers = []

    def start(status: int = 200, body: dict | None = None, drop_first: bool = False) -> str:
        handler = type(
            "Handler",
            (_CannedHandler,),
            {"status": status, "body": json.dumps(body or {}).encode()},
        )
        server = HTTPServer(("127.0.0.1", 0), handler)
        server.drop_first = drop_first
        server.dropped = False
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_address[1]}"

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()
