"""Pipeline graph data model: typed nodes, directed edges, and validation.

A pipeline is a DAG of processing steps. Graph values are immutable:
``add_node``/``add_edge`` return new graphs and never mutate their input,
so a graph can be shared freely across concurrent executions.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .errors import (
    CycleDetectedError,
    CycleIntroducedError,
    DuplicateEdgeError,
    DuplicateNodeIdError,
    MissingRequiredPropertyError,
    RuleViolationError,
    UnknownKindError,
    UnknownNodeError,
)

if TYPE_CHECKING:
    from .rules import RuleSet


class DataKind(str, Enum):
    TEXT = "text"
    AUDIO = "audio"
    IMAGE = "image"


class NodeKind(str, Enum):
    INPUT = "input"
    ASR = "asr"
    MT = "mt"
    TTS = "tts"
    OCR = "ocr"
    ADAPTER = "adapter"
    OUTPUT = "output"


MODEL_KINDS = frozenset({NodeKind.ASR, NodeKind.MT, NodeKind.TTS, NodeKind.OCR})

# Fixed port kinds per model kind: what each model consumes and produces.
MODEL_PORTS: dict[NodeKind, tuple[DataKind, DataKind]] = {
    NodeKind.ASR: (DataKind.AUDIO, DataKind.TEXT),
    NodeKind.MT: (DataKind.TEXT, DataKind.TEXT),
    NodeKind.TTS: (DataKind.TEXT, DataKind.AUDIO),
    NodeKind.OCR: (DataKind.IMAGE, DataKind.TEXT),
}

# Property keys every node of a given kind must carry.
REQUIRED_PROPERTIES: dict[NodeKind, frozenset[str]] = {
    NodeKind.INPUT: frozenset({"data_kind", "source"}),
    NodeKind.ASR: frozenset({"lang"}),
    NodeKind.MT: frozenset({"source_lang", "target_lang"}),
    NodeKind.TTS: frozenset({"lang"}),
    NodeKind.OCR: frozenset({"lang"}),
    NodeKind.ADAPTER: frozenset({"transform"}),
    NodeKind.OUTPUT: frozenset(),
}


@dataclass(frozen=True)
class Node:
    """One processing step, identified by its property set.

    ``insertion_index`` is assigned by ``PipelineGraph.add_node`` and breaks
    ties whenever several nodes are simultaneously ready during ordering.
    """

    id: str
    kind: NodeKind
    properties: dict[str, str] = field(default_factory=dict)
    model_ref: Optional[str] = None
    insertion_index: int = -1

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "properties": dict(self.properties),
            "model_ref": self.model_ref,
            "insertion_index": self.insertion_index,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Node":
        try:
            kind = NodeKind(doc["kind"])
        except ValueError:
            raise UnknownKindError(f"unknown node kind {doc.get('kind')!r}") from None
        return cls(
            id=str(doc["id"]),
            kind=kind,
            properties={str(k): str(v) for k, v in dict(doc.get("properties") or {}).items()},
            model_ref=doc.get("model_ref"),
            insertion_index=int(doc.get("insertion_index", -1)),
        )


@dataclass(frozen=True)
class Edge:
    source: str
    target: str

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target}

    @classmethod
    def from_dict(cls, doc: dict) -> "Edge":
        return cls(source=str(doc["source"]), target=str(doc["target"]))


@dataclass(frozen=True)
class Violation:
    code: str
    node_ids: tuple[str, ...]
    message: str
    rule_name: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "node_ids": list(self.node_ids),
            "rule_name": self.rule_name,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


@dataclass(frozen=True)
class PipelineGraph:
    id: str
    name: str = ""
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownNodeError(f"no node with id {node_id!r}")

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    # -- mutation (returns new graphs) ------------------------------------

    def add_node(self, node: Node) -> "PipelineGraph":
        """Return a copy of this graph containing ``node``.

        The node receives the next insertion index; edges are unchanged.
        """
        if not isinstance(node.kind, NodeKind):
            raise UnknownKindError(f"unknown node kind {node.kind!r}")
        if self.has_node(node.id):
            raise DuplicateNodeIdError(f"node id {node.id!r} already present")
        for key in sorted(REQUIRED_PROPERTIES[node.kind]):
            if key not in node.properties:
                raise MissingRequiredPropertyError(
                    f"{node.kind.value} node {node.id!r} is missing property {key!r}",
                    property_name=key,
                )
        if node.kind in MODEL_KINDS and not node.model_ref:
            raise MissingRequiredPropertyError(
                f"{node.kind.value} node {node.id!r} requires a model_ref",
                property_name="model_ref",
            )
        if node.kind not in MODEL_KINDS and node.model_ref:
            raise ValueError(f"{node.kind.value} node {node.id!r} cannot carry a model_ref")
        next_index = max((n.insertion_index for n in self.nodes), default=-1) + 1
        stamped = replace(node, insertion_index=next_index)
        return replace(self, nodes=self.nodes + (stamped,))

    def add_edge(self, source_id: str, target_id: str, rules: "RuleSet") -> "PipelineGraph":
        """Return a copy with edge source→target appended.

        The edge must keep the graph acyclic and satisfy every rule in
        ``rules``; on rejection the error lists all failing rule names plus
        the structural cause, and this graph is left untouched.
        """
        if not self.has_node(source_id):
            raise UnknownNodeError(f"unknown source node {source_id!r}")
        if not self.has_node(target_id):
            raise UnknownNodeError(f"unknown target node {target_id!r}")
        failed = rules.failing(self.node(source_id), self.node(target_id))
        if any(e.source == source_id and e.target == target_id for e in self.edges):
            raise DuplicateEdgeError(
                f"edge {source_id!r}->{target_id!r} already exists", failed_rules=failed
            )
        if source_id == target_id or self.has_path(target_id, source_id):
            raise CycleIntroducedError(
                f"edge {source_id!r}->{target_id!r} would close a cycle", failed_rules=failed
            )
        if failed:
            raise RuleViolationError(
                f"edge {source_id!r}->{target_id!r} fails rules: {', '.join(failed)}",
                failed_rules=failed,
            )
        return replace(self, edges=self.edges + (Edge(source_id, target_id),))

    # -- structure queries ------------------------------------------------

    def successors(self, node_id: str) -> list[str]:
        return [e.target for e in self.edges if e.source == node_id]

    def predecessors(self, node_id: str) -> list[str]:
        return [e.source for e in self.edges if e.target == node_id]

    def has_path(self, start: str, goal: str) -> bool:
        if start == goal:
            return True
        seen = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for nxt in self.successors(current):
                if nxt == goal:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def topological_order(self) -> list[str]:
        """Execution order: every edge source precedes its target.

        Among simultaneously ready nodes the one added earliest goes first,
        which makes the order (and thus traces) reproducible.
        """
        indegree = {n.id: 0 for n in self.nodes}
        for e in self.edges:
            indegree[e.target] += 1
        index_of = {n.id: n.insertion_index for n in self.nodes}
        ready = [(index_of[nid], nid) for nid, deg in indegree.items() if deg == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            _, nid = heapq.heappop(ready)
            order.append(nid)
            for nxt in self.successors(nid):
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    heapq.heappush(ready, (index_of[nxt], nxt))
        if len(order) != len(self.nodes):
            raise CycleDetectedError("pipeline contains a cycle")
        return order

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [e.to_dict() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineGraph":
        nodes = tuple(Node.from_dict(d) for d in doc.get("nodes", []))
        seen: set[str] = set()
        for n in nodes:
            if n.id in seen:
                raise DuplicateNodeIdError(f"node id {n.id!r} appears twice")
            seen.add(n.id)
        return cls(
            id=str(doc["id"]),
            name=str(doc.get("name", "")),
            nodes=nodes,
            edges=tuple(Edge.from_dict(d) for d in doc.get("edges", [])),
        )


def validate_pipeline(pipeline: PipelineGraph, rules: "RuleSet") -> ValidationReport:
    """Whole-graph check: structure plus every edge against ``rules``.

    All findings land in the report; nothing raises. ``report.ok`` is true
    exactly when a pipeline built through add_node/add_edge would be.
    """
    violations: list[Violation] = []
    known = {n.id for n in pipeline.nodes}

    inputs = [n for n in pipeline.nodes if n.kind == NodeKind.INPUT]
    if not inputs:
        violations.append(Violation("missing-input", (), "pipeline has no input node"))
    elif len(inputs) > 1:
        violations.append(
            Violation(
                "multiple-input",
                tuple(n.id for n in inputs),
                f"pipeline has {len(inputs)} input nodes, expected exactly one",
            )
        )

    for n in pipeline.nodes:
        for key in sorted(REQUIRED_PROPERTIES[n.kind]):
            if key not in n.properties:
                violations.append(
                    Violation(
                        "missing-required-property",
                        (n.id,),
                        f"{n.kind.value} node {n.id!r} is missing property {key!r}",
                    )
                )
        if n.kind in MODEL_KINDS and not n.model_ref:
            violations.append(
                Violation("missing-model-ref", (n.id,), f"model node {n.id!r} has no model_ref")
            )

    seen_pairs: set[tuple[str, str]] = set()
    for e in pipeline.edges:
        missing = [nid for nid in (e.source, e.target) if nid not in known]
        if missing:
            violations.append(
                Violation(
                    "unknown-node",
                    tuple(missing),
                    f"edge {e.source!r}->{e.target!r} references unknown node(s)",
                )
            )
            continue
        if (e.source, e.target) in seen_pairs:
            violations.append(
                Violation(
                    "duplicate-edge",
                    (e.source, e.target),
                    f"edge {e.source!r}->{e.target!r} appears twice",
                )
            )
        seen_pairs.add((e.source, e.target))
        for rule_name in rules.failing(pipeline.node(e.source), pipeline.node(e.target)):
            violations.append(
                Violation(
                    "rule-violation",
                    (e.source, e.target),
                    f"edge {e.source!r}->{e.target!r} fails rule {rule_name!r}",
                    rule_name=rule_name,
                )
            )

    try:
        pipeline.topological_order()
    except CycleDetectedError:
        violations.append(Violation("cycle-detected", (), "pipeline contains a cycle"))
    else:
        if len(inputs) == 1:
            reached = {inputs[0].id}
            queue = deque([inputs[0].id])
            while queue:
                for nxt in pipeline.successors(queue.popleft()):
                    if nxt not in reached:
                        reached.add(nxt)
                        queue.append(nxt)
            for n in pipeline.nodes:
                if n.id not in reached:
                    violations.append(
                        Violation(
                            "unreachable-node",
                            (n.id,),
                            f"node {n.id!r} is not reachable from the input node",
                        )
                    )

    return ValidationReport(violations=tuple(violations))
