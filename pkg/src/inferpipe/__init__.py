"""Typed DAG orchestration for ML inference pipelines.

Pipelines are DAGs of input, model (speech recognition, translation, speech
synthesis, text recognition), adapter, and output nodes. Edges are admitted
only when every compatibility rule passes; validated pipelines persist with
generated execution endpoints and run against external model APIs with
per-node timing.
"""

from .bench import BenchRow, LinearFit, fit_linear_overhead, run_chain_benchmark
from .errors import OrchestratorError
from .executor import (
    AdapterSpec,
    ExecutionTrace,
    NodeTiming,
    Payload,
    apply_adapter,
    compute_overhead,
    execute,
    invoke_model,
)
from .graph import (
    DataKind,
    Edge,
    Node,
    NodeKind,
    PipelineGraph,
    ValidationReport,
    validate_pipeline,
)
from .hub import ModelEntry, ModelHub, RequestTemplate
from .mocks import MockModelServer, MockSpec
from .repository import PipelineRepository, SavedPipeline
from .rules import LanguagePair, Rule, RuleSet, bhashini_ruleset, can_edge_exist, evaluate_rule

__version__ = "0.1.0"

__all__ = [
    "AdapterSpec",
    "BenchRow",
    "DataKind",
    "Edge",
    "ExecutionTrace",
    "LanguagePair",
    "LinearFit",
    "MockModelServer",
    "MockSpec",
    "ModelEntry",
    "ModelHub",
    "Node",
    "NodeKind",
    "NodeTiming",
    "OrchestratorError",
    "Payload",
    "PipelineGraph",
    "PipelineRepository",
    "RequestTemplate",
    "Rule",
    "RuleSet",
    "SavedPipeline",
    "ValidationReport",
    "apply_adapter",
    "bhashini_ruleset",
    "can_edge_exist",
    "compute_overhead",
    "evaluate_rule",
    "execute",
    "fit_linear_overhead",
    "invoke_model",
    "run_chain_benchmark",
    "validate_pipeline",
]
