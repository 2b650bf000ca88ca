#!/usr/bin/env python3
"""Record gateway request/response fixtures for the replay transport.

Run from frontend/:  python3 scripts/record_fixtures.py

Each fixture replays a scripted session against a real in-process gateway
backed by live mock model servers, so the verdicts and traces the JS tests
assert on are genuine engine output, not hand-written expectations. The
request bodies here must mirror what the designer client serializes —
see tests/replay.ts, which matches on method + path + canonical body.
"""

import base64
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from inferpipe.gateway import create_app
from inferpipe.mocks import MockModelServer

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


class Recorder:
    def __init__(self, client: TestClient):
        self.client = client
        self.exchanges = []

    def do(self, method: str, path: str, body=None, expect=None):
        kwargs = {"json": body} if body is not None else {}
        response = self.client.request(method, path, **kwargs)
        if expect is not None and response.status_code != expect:
            raise SystemExit(
                f"{method} {path}: expected {expect}, got "
                f"{response.status_code}: {response.text}"
            )
        self.exchanges.append(
            {
                "method": method,
                "path": path,
                "body": body,
                "status": response.status_code,
                "response": response.json(),
            }
        )
        return response.json()


def node(node_id, kind, properties, model_ref=None, index=0):
    return {
        "id": node_id,
        "kind": kind,
        "properties": properties,
        "model_ref": model_ref,
        "insertion_index": index,
    }


def doc(canvas_id, name, nodes, edges):
    return {
        "id": canvas_id,
        "name": name,
        "nodes": nodes,
        "edges": [{"source": s, "target": t} for s, t in edges],
    }


def registration(name, task, pairs, endpoint):
    return {
        "name": name,
        "version": "1.0-rec",
        "task": task,
        "supported_pairs": pairs,
        "endpoint": endpoint,
    }


def write_fixture(filename: str, context: dict, recorder: Recorder) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / filename
    path.write_text(
        json.dumps(
            {"context": context, "exchanges": recorder.exchanges},
            indent=2,
            ensure_ascii=False,
        )
        + "\n"
    )
    print(f"wrote {path.relative_to(Path.cwd())} ({len(recorder.exchanges)} exchanges)")


def record_empty_hub(mock_base: str) -> None:
    with tempfile.TemporaryDirectory() as hub_dir, tempfile.TemporaryDirectory() as store_dir:
        rec = Recorder(TestClient(create_app(hub_dir, store_dir)))
        rec.do("GET", "/models", expect=200)
        rec.do("GET", "/pipelines", expect=200)
        rec.do("GET", "/health", expect=200)
        write_fixture("empty-hub.json", {"mock_base": mock_base}, rec)


def record_designer_session(mock_base: str) -> None:
    """The full designer flow: palette, gestures, save, Zoo, test run."""
    with tempfile.TemporaryDirectory() as hub_dir, tempfile.TemporaryDirectory() as store_dir:
        rec = Recorder(TestClient(create_app(hub_dir, store_dir)))

        mt_id = rec.do(
            "POST", "/models",
            registration("bridge-mt", "mt", [["en", "hi"]], f"{mock_base}/mt/en-hi"),
            expect=201,
        )["id"]
        rec.do(
            "POST", "/models",
            registration("bridge-mt-back", "mt", [["hi", "en"]], f"{mock_base}/mt/hi-en"),
            expect=201,
        )
        asr_id = rec.do(
            "POST", "/models",
            registration("stream-asr", "asr", ["en"], f"{mock_base}/asr/en"),
            expect=201,
        )["id"]
        tts_id = rec.do(
            "POST", "/models",
            registration("voice-tts", "tts", ["hi"], f"{mock_base}/tts/hi"),
            expect=201,
        )["id"]
        rec.do("GET", "/models", expect=200)

        # Canvas gestures, in the order the scripted session performs them.
        # insertion_index mirrors the designer's monotonic counter: tts1 (3)
        # is removed before out (4) is added, so 3 never reappears.
        n_in = node("in", "input", {"data_kind": "audio", "source": "upload", "lang": "en"}, index=0)
        n_asr = node("asr1", "asr", {"lang": "en"}, model_ref=asr_id, index=1)
        n_mt = node("mt1", "mt", {"source_lang": "en", "target_lang": "hi"}, model_ref=mt_id, index=2)
        n_tts = node("tts1", "tts", {"lang": "hi"}, model_ref=tts_id, index=3)
        n_out = node("out", "output", {}, index=4)
        canvas = lambda nodes, edges: doc("canvas-session", "voice-translation", nodes, edges)

        rec.do(
            "POST", "/pipelines/validate-edge",
            {"pipeline": canvas([n_in, n_asr], []), "source": "in", "target": "asr1"},
            expect=200,
        )
        rec.do(
            "POST", "/pipelines/validate-edge",
            {
                "pipeline": canvas([n_in, n_asr, n_mt], [("in", "asr1")]),
                "source": "asr1",
                "target": "mt1",
            },
            expect=200,
        )
        rejected = rec.do(
            "POST", "/pipelines/validate-edge",
            {
                "pipeline": canvas([n_in, n_asr, n_mt, n_tts], [("in", "asr1"), ("asr1", "mt1")]),
                "source": "tts1",
                "target": "mt1",
            },
            expect=200,
        )
        assert not rejected["valid"] and "kind-compatibility" in rejected["failed_rules"], rejected
        rec.do(
            "POST", "/pipelines/validate-edge",
            {
                "pipeline": canvas([n_in, n_asr, n_mt, n_out], [("in", "asr1"), ("asr1", "mt1")]),
                "source": "mt1",
                "target": "out",
            },
            expect=200,
        )

        final = canvas(
            [n_in, n_asr, n_mt, n_out],
            [("in", "asr1"), ("asr1", "mt1"), ("mt1", "out")],
        )
        endpoint_id = rec.do(
            "POST", "/pipelines",
            {"pipeline": final, "description": "voice translation demo"},
            expect=201,
        )["endpoint_id"]
        rec.do("GET", "/pipelines", expect=200)
        rec.do("GET", f"/pipelines/{endpoint_id}", expect=200)

        # Pre-synthesized audio round-trips through the mock recognizer.
        audio = base64.b64encode(b"TTSAUDIO:hello").decode("ascii")
        payload = {"kind": "audio", "data": audio, "format": "wav", "metadata": {}}
        run = rec.do("POST", "/execute", {"pipeline": final, "input": payload}, expect=200)
        assert run["output"]["data"] == "MT(en->hi): hello", run["output"]
        rec.do("POST", f"/run/{endpoint_id}", payload, expect=200)

        write_fixture("designer-session.json", {"mock_base": mock_base}, rec)


def record_canvas_gestures(mock_base: str) -> None:
    """Hub with two translators; cycle gesture, stray-node save, error paths."""
    with tempfile.TemporaryDirectory() as hub_dir, tempfile.TemporaryDirectory() as store_dir:
        rec = Recorder(TestClient(create_app(hub_dir, store_dir)))

        fwd_id = rec.do(
            "POST", "/models",
            registration("relay-mt", "mt", [["en", "hi"]], f"{mock_base}/mt/en-hi"),
            expect=201,
        )["id"]
        back_id = rec.do(
            "POST", "/models",
            registration("relay-mt-back", "mt", [["hi", "en"]], f"{mock_base}/mt/hi-en"),
            expect=201,
        )["id"]
        rec.do("GET", "/models?task=mt", expect=200)
        rec.do("GET", "/models?task=asr", expect=200)

        mt1 = node("mt1", "mt", {"source_lang": "en", "target_lang": "hi"}, model_ref=fwd_id, index=0)
        mt2 = node("mt2", "mt", {"source_lang": "hi", "target_lang": "en"}, model_ref=back_id, index=1)
        lab = lambda edges: doc("canvas-lab", "lab", [mt1, mt2], edges)

        rec.do(
            "POST", "/pipelines/validate-edge",
            {"pipeline": lab([]), "source": "mt1", "target": "mt2"},
            expect=200,
        )
        cycle = rec.do(
            "POST", "/pipelines/validate-edge",
            {"pipeline": lab([("mt1", "mt2")]), "source": "mt2", "target": "mt1"},
            expect=200,
        )
        assert cycle["failed_rules"] == ["cycle-introduced"], cycle

        rec.do(
            "POST", "/pipelines/validate-edge",
            {
                "pipeline": doc("canvas-lab", "lab", [mt1], []),
                "source": "mt1",
                "target": "ghost",
            },
            expect=404,
        )

        r_in = node("in", "input", {"data_kind": "text", "source": "upload", "lang": "en"}, index=0)
        r_mt = node("mt1", "mt", {"source_lang": "en", "target_lang": "hi"}, model_ref=fwd_id, index=1)
        r_out = node("out", "output", {}, index=2)
        run_doc = doc("canvas-run", "hello-run", [r_in, r_mt, r_out], [("in", "mt1"), ("mt1", "out")])
        run = rec.do(
            "POST", "/execute",
            {"pipeline": run_doc, "input": {"kind": "text", "data": "hello", "metadata": {}}},
            expect=200,
        )
        assert run["output"]["data"] == "MT(en->hi): hello", run["output"]

        stray = node("stray", "mt", {"source_lang": "hi", "target_lang": "en"}, model_ref=back_id, index=3)
        stray_doc = doc(
            "canvas-stray", "stray",
            [r_in, r_mt, r_out, stray],
            [("in", "mt1"), ("mt1", "out")],
        )
        refused = rec.do(
            "POST", "/pipelines",
            {"pipeline": stray_doc, "description": "has a stray node"},
            expect=422,
        )
        codes = [v["code"] for v in refused["details"]["report"]["violations"]]
        assert codes == ["unreachable-node"], codes

        rec.do("GET", "/pipelines/nosuchending", expect=404)

        write_fixture("canvas-gestures.json", {"mock_base": mock_base}, rec)


def main() -> None:
    server = MockModelServer(latency_ms=3.0)
    server.start()
    try:
        mock_base = f"http://127.0.0.1:{server.port}"
        record_empty_hub(mock_base)
        record_designer_session(mock_base)
        record_canvas_gestures(mock_base)
    finally:
        server.stop()


if __name__ == "__main__":
    main()
