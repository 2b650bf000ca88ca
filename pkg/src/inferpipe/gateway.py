"""REST gateway: the HTTP surface for the model hub, pipeline validation,
the saved-pipeline catalog, and execution.

Handlers are thin: they decode JSON, call the engine, and map domain errors
onto HTTP statuses with a uniform error body
``{"code": ..., "message": ..., "details": ...}``.
"""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .errors import NotFoundError, OrchestratorError
from .executor import DEFAULT_TIMEOUT_S, Payload, execute
from .graph import PipelineGraph
from .hub import ModelEntry, ModelHub
from .repository import PipelineRepository
from .rules import LanguagePair

log = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "not-found": 404,
    "unknown-node": 404,
    "duplicate-name-version": 409,
    "invalid-entry": 422,
    "invalid-pipeline": 422,
    "input-kind-mismatch": 422,
    "kind-mismatch": 422,
    "node-failure": 502,
    "storage-failure": 500,
}


def _error(status: int, code: str, message: str, details=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if details is not None:
        body["details"] = details
    return JSONResponse(status_code=status, content=body)


def _parse_pipeline(doc) -> PipelineGraph:
    if not isinstance(doc, dict):
        raise ValueError("pipeline must be a JSON object")
    return PipelineGraph.from_dict(doc)


def create_app(
    hub_dir: str | Path,
    store_dir: str | Path,
    model_timeout: float = DEFAULT_TIMEOUT_S,
) -> FastAPI:
    """Build the service over a hub directory and a pipeline store directory."""
    app = FastAPI(title="inferpipe gateway", docs_url=None, redoc_url=None)
    hub = ModelHub(hub_dir)
    repo = PipelineRepository(store_dir)
    app.state.hub = hub
    app.state.repo = repo

    def ruleset():
        from .rules import bhashini_ruleset

        return bhashini_ruleset(hub.find)

    @app.exception_handler(OrchestratorError)
    async def on_domain_error(request: Request, exc: OrchestratorError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        details = dict(exc.details) or None
        report = getattr(exc, "report", None)
        if report is not None:
            details = (details or {}) | {"report": report.to_dict()}
        trace = getattr(exc, "trace", None)
        if trace is not None:
            details = (details or {}) | {"trace": trace.to_dict()}
        return _error(status, exc.code, exc.message, details)

    @app.exception_handler(RequestValidationError)
    async def on_malformed(request: Request, exc: RequestValidationError):
        return _error(400, "malformed-body", "request body does not parse")

    # -- model hub --------------------------------------------------------

    @app.post("/models", status_code=201)
    async def register_model(body: dict = Body(...)):
        try:
            entry = ModelEntry.from_dict(body)
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            return _error(400, "malformed-body", f"bad model entry: {exc}")
        return {"id": hub.register(entry)}

    @app.get("/models")
    async def list_models(
        task: str | None = None,
        source_lang: str | None = None,
        target_lang: str | None = None,
    ):
        pair = None
        if source_lang and target_lang:
            pair = LanguagePair(source_lang, target_lang)
        return [e.to_dict() for e in hub.list(task=task, pair=pair)]

    @app.get("/models/{entry_id}")
    async def get_model(entry_id: str):
        return hub.get(entry_id).to_dict()

    # -- builder validation ----------------------------------------------

    @app.post("/pipelines/validate-edge")
    async def validate_edge(body: dict = Body(...)):
        try:
            pipeline = _parse_pipeline(body["pipeline"])
            source_id = str(body["source"])
            target_id = str(body["target"])
        except (KeyError, ValueError, TypeError, OrchestratorError) as exc:
            return _error(400, "malformed-body", f"bad validate-edge request: {exc}")
        for node_id in (source_id, target_id):
            if not pipeline.has_node(node_id):
                raise NotFoundError(f"no node with id {node_id!r} in pipeline")
        failed = ruleset().failing(pipeline.node(source_id), pipeline.node(target_id))
        if source_id == target_id or pipeline.has_path(target_id, source_id):
            failed = failed + ["cycle-introduced"]
        return {"valid": not failed, "failed_rules": failed}

    # -- repository / catalog --------------------------------------------

    @app.post("/pipelines", status_code=201)
    async def save_pipeline(body: dict = Body(...)):
        try:
            pipeline = _parse_pipeline(body["pipeline"])
            description = str(body.get("description", ""))
        except (KeyError, ValueError, TypeError) as exc:
            return _error(400, "malformed-body", f"bad save request: {exc}")
        return {"endpoint_id": repo.save(pipeline, description, ruleset())}

    @app.get("/pipelines")
    async def list_pipelines():
        return repo.list()

    @app.get("/pipelines/{endpoint_id}")
    async def get_pipeline(endpoint_id: str):
        return repo.load(endpoint_id).to_dict()

    # -- execution --------------------------------------------------------

    def _parse_payload(doc) -> Payload:
        if not isinstance(doc, dict):
            raise ValueError("input payload must be a JSON object")
        payload = Payload.from_dict(doc)
        payload.validate()
        return payload

    def _run(pipeline: PipelineGraph, payload: Payload) -> dict:
        output, trace = execute(pipeline, payload, hub, timeout=model_timeout)
        return {"output": output.to_dict(), "trace": trace.to_dict()}

    @app.post("/execute")
    async def execute_adhoc(body: dict = Body(...)):
        """Test a pipeline without saving it; nothing is persisted."""
        try:
            pipeline = _parse_pipeline(body["pipeline"])
            payload = _parse_payload(body["input"])
        except (KeyError, ValueError, TypeError, OrchestratorError) as exc:
            return _error(400, "malformed-body", f"bad execute request: {exc}")
        return _run(pipeline, payload)

    @app.post("/run/{endpoint_id}")
    async def run_saved(endpoint_id: str, body: dict = Body(...)):
        record = repo.load(endpoint_id)
        try:
            payload = _parse_payload(body)
        except (KeyError, ValueError, TypeError, OrchestratorError) as exc:
            return _error(400, "malformed-body", f"bad input payload: {exc}")
        return _run(record.pipeline, payload)

    @app.get("/health")
    async def health():
        return {"status": "ok", "models": len(hub), "pipelines": len(repo)}

    return app
