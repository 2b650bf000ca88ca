"""Runs validated pipelines: routes payloads edge by edge, calls model APIs,
applies adapters, and times every node.

Each run produces an execution trace that splits total wall time into time
spent inside model round trips and everything else (the orchestration
overhead). A single run is strictly sequential; concurrent runs of the same
immutable pipeline are safe.
"""

from __future__ import annotations

import base64
import re
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import requests

from .errors import (
    HttpStatusError,
    InputKindMismatchError,
    InvalidEntryError,
    InvalidPipelineError,
    KindMismatchError,
    MalformedResponseError,
    NodeFailureError,
    TransportError,
)
from .graph import DataKind, MODEL_KINDS, Node, NodeKind, PipelineGraph, validate_pipeline
from .hub import ModelEntry, ModelHub
from .rules import RuleSet, bhashini_ruleset

DEFAULT_TIMEOUT_S = 120.0
_RETRY_BACKOFF_S = 0.1


def _now_ms() -> float:
    return time.perf_counter() * 1000.0


@dataclass(frozen=True)
class Payload:
    """Data moving along an edge: text as-is, audio/image as base64 + format tag."""

    kind: DataKind
    data: str
    fmt: Optional[str] = None
    metadata: dict = field(default_factory=dict)

    @classmethod
    def text(cls, data: str, metadata: dict | None = None) -> "Payload":
        return cls(kind=DataKind.TEXT, data=data, metadata=dict(metadata or {}))

    @classmethod
    def from_bytes(cls, kind: DataKind, raw: bytes, fmt: str, metadata: dict | None = None) -> "Payload":
        return cls(
            kind=kind,
            data=base64.b64encode(raw).decode("ascii"),
            fmt=fmt,
            metadata=dict(metadata or {}),
        )

    def binary(self) -> bytes:
        return base64.b64decode(self.data, validate=True)

    def validate(self):
        if self.kind != DataKind.TEXT:
            try:
                self.binary()
            except (ValueError, TypeError):
                raise KindMismatchError(
                    f"{self.kind.value} payload data is not valid base64"
                ) from None

    def to_dict(self) -> dict:
        doc = {"kind": self.kind.value, "data": self.data, "metadata": dict(self.metadata)}
        if self.fmt is not None:
            doc["format"] = self.fmt
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Payload":
        return cls(
            kind=DataKind(doc.get("kind", "text")),
            data=str(doc.get("data", "")),
            fmt=doc.get("format"),
            metadata=dict(doc.get("metadata") or {}),
        )


@dataclass(frozen=True)
class NodeTiming:
    node_id: str
    started_at: float
    finished_at: float
    model_ms: float = 0.0

    @property
    def duration_ms(self) -> float:
        return self.finished_at - self.started_at

    @property
    def node_overhead_ms(self) -> float:
        return self.duration_ms - self.model_ms

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "model_ms": self.model_ms,
            "node_overhead_ms": self.node_overhead_ms,
        }


@dataclass(frozen=True)
class ExecutionTrace:
    pipeline_id: str
    nodes: tuple[NodeTiming, ...]
    total_ms: float
    model_ms: float
    overhead_ms: float

    @classmethod
    def from_totals(
        cls,
        pipeline_id: str,
        total_ms: float,
        model_ms: float,
        nodes: tuple[NodeTiming, ...] = (),
    ) -> "ExecutionTrace":
        return cls(
            pipeline_id=pipeline_id,
            nodes=nodes,
            total_ms=total_ms,
            model_ms=model_ms,
            overhead_ms=total_ms - model_ms,
        )

    def to_dict(self) -> dict:
        return {
            "pipeline_id": self.pipeline_id,
            "nodes": [t.to_dict() for t in self.nodes],
            "total_ms": self.total_ms,
            "model_ms": self.model_ms,
            "overhead_ms": self.overhead_ms,
        }


def compute_overhead(trace: ExecutionTrace) -> dict:
    """Decompose a trace into totals plus the overhead share of the runtime."""
    fraction = trace.overhead_ms / trace.total_ms if trace.total_ms else 0.0
    return {
        "total_ms": trace.total_ms,
        "model_ms": trace.model_ms,
        "overhead_ms": trace.overhead_ms,
        "overhead_fraction": fraction,
    }


# -- adapters -------------------------------------------------------------


@dataclass(frozen=True)
class AdapterSpec:
    transform: str
    in_kind: Optional[DataKind]
    out_kind: Optional[DataKind]


def _text_cleanup(text: str) -> str:
    # Drop non-printables (keeping whitespace for the collapse step),
    # squash whitespace runs to single spaces, trim the ends.
    kept = "".join(c for c in text if c.isprintable() or c.isspace())
    return re.sub(r"\s+", " ", kept).strip()


ADAPTER_SPECS = {
    "identity": AdapterSpec("identity", in_kind=None, out_kind=None),
    "text_cleanup": AdapterSpec("text_cleanup", in_kind=DataKind.TEXT, out_kind=DataKind.TEXT),
}


def adapter_spec(transform: str) -> AdapterSpec:
    try:
        return ADAPTER_SPECS[transform]
    except KeyError:
        raise ValueError(f"unknown adapter transform {transform!r}") from None


def apply_adapter(spec: AdapterSpec, payload: Payload) -> Payload:
    if spec.in_kind is not None and payload.kind != spec.in_kind:
        raise KindMismatchError(
            f"{spec.transform} adapter takes {spec.in_kind.value}, got {payload.kind.value}"
        )
    if spec.transform == "identity":
        return payload
    if spec.transform == "text_cleanup":
        return replace(payload, data=_text_cleanup(payload.data))
    raise ValueError(f"unknown adapter transform {spec.transform!r}")


# -- model invocation -----------------------------------------------------


def invoke_model(
    entry: ModelEntry,
    payload: Payload,
    timeout: float = DEFAULT_TIMEOUT_S,
) -> tuple[Payload, float]:
    """POST the payload to the entry's API; return (result, round-trip ms).

    The round trip is timed wall-clock around the successful HTTP exchange.
    Transport failures get one retry after a short backoff; HTTP error
    statuses do not.
    """
    if entry.backend != "api":
        raise InvalidEntryError(
            f"model {entry.name!r} is {entry.backend}-backed; only api-backed models execute"
        )
    if payload.kind != entry.input_kind:
        raise KindMismatchError(
            f"model {entry.name!r} takes {entry.input_kind.value}, got {payload.kind.value}"
        )
    template = entry.request_template
    url = entry.endpoint.rstrip("/") + template.path
    wire_metadata = dict(payload.metadata)
    wire_metadata["kind"] = payload.kind.value
    if payload.fmt is not None:
        wire_metadata["format"] = payload.fmt
    body = {template.payload_field: payload.data, "metadata": wire_metadata}

    response = None
    for attempt in (1, 2):
        started = _now_ms()
        try:
            response = requests.post(url, json=body, timeout=timeout)
            break
        except requests.RequestException as exc:
            if attempt == 2:
                raise TransportError(f"model call to {url} failed: {exc}") from exc
            time.sleep(_RETRY_BACKOFF_S)
    model_ms = _now_ms() - started

    if not 200 <= response.status_code < 300:
        raise HttpStatusError(
            f"model call to {url} returned status {response.status_code}",
            status=response.status_code,
        )
    try:
        doc = response.json()
    except ValueError:
        raise MalformedResponseError(f"model at {url} returned non-JSON body") from None
    if not isinstance(doc, dict) or template.response_field not in doc:
        raise MalformedResponseError(
            f"model response is missing field {template.response_field!r}"
        )
    data = doc[template.response_field]
    if not isinstance(data, str):
        raise MalformedResponseError(
            f"model response field {template.response_field!r} is not a string"
        )
    metadata = {str(k): str(v) for k, v in dict(doc.get("metadata") or {}).items()}
    fmt = metadata.pop("format", None)
    out_kind = entry.output_kind
    if fmt is None and out_kind != DataKind.TEXT:
        fmt = "wav" if out_kind == DataKind.AUDIO else "png"
    result = Payload(kind=out_kind, data=data, fmt=fmt, metadata=metadata)
    return result, model_ms


# -- pipeline execution ---------------------------------------------------


def execute(
    pipeline: PipelineGraph,
    input_payload: Payload,
    hub: ModelHub,
    rules: RuleSet | None = None,
    timeout: float = DEFAULT_TIMEOUT_S,
) -> tuple[Payload, ExecutionTrace]:
    """Run the pipeline on one payload; return the final payload and trace.

    Nodes run in topological order. A node with several predecessors takes
    the payload of the one finishing last in that order. Any node failure
    aborts the run; the raised error keeps the timings of completed nodes.
    """
    run_started = _now_ms()
    report = validate_pipeline(pipeline, rules or bhashini_ruleset(hub.find))
    if not report.ok:
        raise InvalidPipelineError(
            f"pipeline {pipeline.id!r} fails validation: {report.codes()}", report=report
        )
    input_node = next(n for n in pipeline.nodes if n.kind == NodeKind.INPUT)
    expected = DataKind(input_node.properties["data_kind"])
    if input_payload.kind != expected:
        raise InputKindMismatchError(
            f"pipeline expects {expected.value} input, got {input_payload.kind.value}"
        )

    order = pipeline.topological_order()
    position = {nid: i for i, nid in enumerate(order)}
    results: dict[str, Payload] = {}
    timings: list[NodeTiming] = []

    def incoming_payload(node: Node) -> Payload:
        preds = pipeline.predecessors(node.id)
        latest = max(preds, key=lambda nid: position[nid])
        return results[latest]

    def partial_trace() -> ExecutionTrace:
        now = _now_ms()
        model_total = sum(t.model_ms for t in timings)
        return ExecutionTrace.from_totals(
            pipeline.id, total_ms=now - run_started, model_ms=model_total, nodes=tuple(timings)
        )

    for node_id in order:
        node = pipeline.node(node_id)
        started = _now_ms()
        model_ms = 0.0
        try:
            if node.kind == NodeKind.INPUT:
                result = input_payload
            elif node.kind in MODEL_KINDS:
                entry = hub.get(node.model_ref)
                result, model_ms = invoke_model(entry, incoming_payload(node), timeout=timeout)
            elif node.kind == NodeKind.ADAPTER:
                spec = adapter_spec(node.properties["transform"])
                result = apply_adapter(spec, incoming_payload(node))
            else:
                result = incoming_payload(node)
        except Exception as exc:
            raise NodeFailureError(
                f"node {node_id!r} failed: {exc}",
                node_id=node_id,
                cause=exc,
                trace=partial_trace(),
            ) from exc
        finished = _now_ms()
        results[node_id] = result
        timings.append(
            NodeTiming(node_id=node_id, started_at=started, finished_at=finished, model_ms=model_ms)
        )

    sinks = [nid for nid in order if pipeline.node(nid).kind == NodeKind.OUTPUT]
    final_id = sinks[-1] if sinks else order[-1]
    total_ms = _now_ms() - run_started
    model_total = sum(t.model_ms for t in timings)
    trace = ExecutionTrace.from_totals(
        pipeline.id, total_ms=total_ms, model_ms=model_total, nodes=tuple(timings)
    )
    return results[final_id], trace
