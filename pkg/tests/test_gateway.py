import pytest
from fastapi.testclient import TestClient

from inferpipe import Payload, bhashini_ruleset, can_edge_exist
from inferpipe.gateway import create_app

from conftest import build_mt_pipeline


@pytest.fixture
def service(tmp_path):
    app = create_app(tmp_path / "hub", tmp_path / "store")
    with TestClient(app) as client:
        yield client


def model_doc(mock_server, task="mt", langspec="en-hi", name=None, version="1.0"):
    if task == "mt":
        src, tgt = langspec.split("-")
        pairs = [[src, tgt]]
    else:
        pairs = [langspec]
    return {
        "name": name or f"mock-{task}-{langspec}",
        "version": version,
        "task": task,
        "supported_pairs": pairs,
        "backend": "api",
        "endpoint": mock_server.endpoint_for(task, langspec),
    }


@pytest.fixture
def mt_model_id(service, mock_server):
    response = service.post("/models", json=model_doc(mock_server))
    assert response.status_code == 201
    return response.json()["id"]


def pipeline_doc(mt_id):
    return {
        "id": "p1",
        "name": "en-hi",
        "nodes": [
            {"id": "in", "kind": "input",
             "properties": {"data_kind": "text", "source": "upload", "lang": "en"},
             "model_ref": None, "insertion_index": 0},
            {"id": "mt1", "kind": "mt",
             "properties": {"source_lang": "en", "target_lang": "hi"},
             "model_ref": mt_id, "insertion_index": 1},
            {"id": "out", "kind": "output", "properties": {},
             "model_ref": None, "insertion_index": 2},
        ],
        "edges": [{"source": "in", "target": "mt1"}, {"source": "mt1", "target": "out"}],
    }


class TestModelRoutes:
    def test_register_and_fetch(self, service, mock_server):
        created = service.post("/models", json=model_doc(mock_server)).json()
        got = service.get(f"/models/{created['id']}")
        assert got.status_code == 200
        body = got.json()
        assert body["name"] == "mock-mt-en-hi"
        assert body["input_kind"] == "text" and body["output_kind"] == "text"

    def test_listing_and_filters(self, service, mock_server):
        service.post("/models", json=model_doc(mock_server))
        service.post("/models", json=model_doc(mock_server, langspec="hi-en"))
        service.post("/models", json=model_doc(mock_server, task="asr", langspec="en"))
        assert len(service.get("/models").json()) == 3
        assert len(service.get("/models", params={"task": "mt"}).json()) == 2
        filtered = service.get(
            "/models", params={"task": "mt", "source_lang": "en", "target_lang": "hi"}
        ).json()
        assert [e["name"] for e in filtered] == ["mock-mt-en-hi"]

    def test_duplicate_is_conflict(self, service, mock_server):
        assert service.post("/models", json=model_doc(mock_server)).status_code == 201
        response = service.post("/models", json=model_doc(mock_server))
        assert response.status_code == 409
        assert response.json()["code"] == "duplicate-name-version"

    def test_invalid_entry_is_unprocessable(self, service, mock_server):
        doc = model_doc(mock_server) | {"task": "asr", "supported_pairs": ["en"], "endpoint": ""}
        response = service.post("/models", json=doc)
        assert response.status_code == 422
        assert response.json()["code"] == "invalid-entry"

    def test_structurally_bad_entry_is_malformed(self, service):
        response = service.post("/models", json={"task": "mt", "supported_pairs": [["en"]]})
        assert response.status_code == 400
        assert response.json()["code"] == "malformed-body"

    def test_unknown_model_is_not_found(self, service):
        response = service.get("/models/ghost")
        assert response.status_code == 404
        assert response.json()["code"] == "not-found"


class TestValidateEdge:
    def test_valid_edge(self, service, mt_model_id):
        response = service.post(
            "/pipelines/validate-edge",
            json={"pipeline": pipeline_doc(mt_model_id), "source": "in", "target": "mt1"},
        )
        assert response.status_code == 200
        assert response.json() == {"valid": True, "failed_rules": []}

    def test_rejected_edge_names_rules(self, service, mt_model_id):
        response = service.post(
            "/pipelines/validate-edge",
            json={"pipeline": pipeline_doc(mt_model_id), "source": "out", "target": "mt1"},
        )
        body = response.json()
        assert body["valid"] is False
        assert "kind-compatibility" in body["failed_rules"]

    def test_cycle_flagged(self, service, mt_model_id):
        response = service.post(
            "/pipelines/validate-edge",
            json={"pipeline": pipeline_doc(mt_model_id), "source": "mt1", "target": "in"},
        )
        assert "cycle-introduced" in response.json()["failed_rules"]

    def test_unknown_node_is_404(self, service, mt_model_id):
        response = service.post(
            "/pipelines/validate-edge",
            json={"pipeline": pipeline_doc(mt_model_id), "source": "in", "target": "ghost"},
        )
        assert response.status_code == 404

    def test_missing_key_is_malformed(self, service, mt_model_id):
        response = service.post(
            "/pipelines/validate-edge", json={"pipeline": pipeline_doc(mt_model_id)}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "malformed-body"

    def test_agrees_with_in_process_engine(self, service, mt_model_id, seeded_hub):
        hub, _ = seeded_hub
        doc = pipeline_doc(mt_model_id)
        from inferpipe import PipelineGraph

        graph = PipelineGraph.from_dict(doc)
        rules = bhashini_ruleset()  # structural verdicts only, same as a fresh service
        for source in ("in", "mt1", "out"):
            for target in ("in", "mt1", "out"):
                if source == target:
                    continue
                response = service.post(
                    "/pipelines/validate-edge",
                    json={"pipeline": doc, "source": source, "target": target},
                ).json()
                engine_says = can_edge_exist(graph.node(source), graph.node(target), rules)
                cycle = graph.has_path(target, source)
                assert response["valid"] == (engine_says and not cycle)


class TestPipelineRoutes:
    def test_save_list_fetch(self, service, mt_model_id):
        saved = service.post(
            "/pipelines", json={"pipeline": pipeline_doc(mt_model_id), "description": "demo"}
        )
        assert saved.status_code == 201
        endpoint_id = saved.json()["endpoint_id"]

        listed = service.get("/pipelines").json()
        assert [x["endpoint_id"] for x in listed] == [endpoint_id]
        assert listed[0]["node_count"] == 3

        fetched = service.get(f"/pipelines/{endpoint_id}").json()
        assert fetched["pipeline"]["id"] == "p1"
        assert len(fetched["pipeline"]["nodes"]) == 3

    def test_invalid_pipeline_rejected_with_report(self, service, mt_model_id):
        doc = pipeline_doc(mt_model_id)
        doc["nodes"] = doc["nodes"][1:]  # drop the input node
        response = service.post("/pipelines", json={"pipeline": doc})
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "invalid-pipeline"
        codes = [v["code"] for v in body["details"]["report"]["violations"]]
        assert "missing-input" in codes

    def test_unknown_pipeline_is_404(self, service):
        assert service.get("/pipelines/000000000000").status_code == 404


class TestExecution:
    def test_adhoc_execute(self, service, mt_model_id):
        response = service.post(
            "/execute",
            json={
                "pipeline": pipeline_doc(mt_model_id),
                "input": {"kind": "text", "data": "hello"},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["output"]["data"] == "MT(en->hi): hello"
        trace = body["trace"]
        assert trace["overhead_ms"] == trace["total_ms"] - trace["model_ms"]
        assert [t["node_id"] for t in trace["nodes"]] == ["in", "mt1", "out"]
        # Nothing was persisted by the test run.
        assert service.get("/pipelines").json() == []

    def test_run_saved_pipeline(self, service, mt_model_id):
        endpoint_id = service.post(
            "/pipelines", json={"pipeline": pipeline_doc(mt_model_id)}
        ).json()["endpoint_id"]
        response = service.post(f"/run/{endpoint_id}", json={"kind": "text", "data": "ping"})
        assert response.status_code == 200
        assert response.json()["output"]["data"] == "MT(en->hi): ping"

    def test_run_unknown_endpoint(self, service):
        response = service.post("/run/000000000000", json={"kind": "text", "data": "x"})
        assert response.status_code == 404

    def test_wrong_input_kind(self, service, mt_model_id):
        response = service.post(
            "/execute",
            json={
                "pipeline": pipeline_doc(mt_model_id),
                "input": {"kind": "audio", "data": "aGk=", "format": "wav"},
            },
        )
        assert response.status_code == 422
        assert response.json()["code"] == "input-kind-mismatch"

    def test_bad_payload_is_malformed(self, service, mt_model_id):
        response = service.post(
            "/execute",
            json={"pipeline": pipeline_doc(mt_model_id), "input": {"kind": "video", "data": ""}},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "malformed-body"

    def test_non_json_body_is_malformed(self, service):
        response = service.post(
            "/execute", content=b"not json", headers={"Content-Type": "application/json"}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "malformed-body"

    def test_dead_model_is_node_failure(self, service):
        dead = service.post(
            "/models",
            json={
                "name": "dead-mt", "version": "1", "task": "mt",
                "supported_pairs": [["en", "hi"]], "backend": "api",
                "endpoint": "http://127.0.0.1:9",
            },
        ).json()["id"]
        response = service.post(
            "/execute",
            json={"pipeline": pipeline_doc(dead), "input": {"kind": "text", "data": "x"}},
        )
        assert response.status_code == 502
        body = response.json()
        assert body["code"] == "node-failure"
        assert body["details"]["node_id"] == "mt1"
        assert [t["node_id"] for t in body["details"]["trace"]["nodes"]] == ["in"]


class TestDurabilityAcrossRestart:
    def test_hub_and_catalog_survive(self, tmp_path, mock_server):
        first = create_app(tmp_path / "hub", tmp_path / "store")
        with TestClient(first) as client:
            model_id = client.post("/models", json=model_doc(mock_server)).json()["id"]
            endpoint_id = client.post(
                "/pipelines", json={"pipeline": pipeline_doc(model_id), "description": "kept"}
            ).json()["endpoint_id"]

        second = create_app(tmp_path / "hub", tmp_path / "store")
        with TestClient(second) as client:
            assert client.get(f"/models/{model_id}").status_code == 200
            listed = client.get("/pipelines").json()
            assert [x["endpoint_id"] for x in listed] == [endpoint_id]
            response = client.post(f"/run/{endpoint_id}", json={"kind": "text", "data": "again"})
            assert response.json()["output"]["data"] == "MT(en->hi): again"

    def test_health_reports_counts(self, tmp_path, mock_server):
        app = create_app(tmp_path / "hub", tmp_path / "store")
        with TestClient(app) as client:
            assert client.get("/health").json() == {"status": "ok", "models": 0, "pipelines": 0}
            client.post("/models", json=model_doc(mock_server))
            assert client.get("/health").json()["models"] == 1
