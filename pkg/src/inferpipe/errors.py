"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so the HTTP gateway
and the CLI can report failures without parsing messages.
"""

from __future__ import annotations


class OrchestratorError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class DuplicateNodeIdError(OrchestratorError):
    code = "duplicate-id"


class MissingRequiredPropertyError(OrchestratorError):
    code = "missing-required-property"

    def __init__(self, message: str, property_name: str, **details):
        super().__init__(message, property_name=property_name, **details)
        self.property_name = property_name


class UnknownKindError(OrchestratorError):
    code = "unknown-kind"


class UnknownNodeError(OrchestratorError):
    code = "unknown-node"


class EdgeRejectedError(OrchestratorError):
    """Base for edge additions refused by structural or rule checks.

    ``failed_rules`` always lists every failing rule name, even when the
    rejection is primarily structural, so callers see the full picture.
    """

    def __init__(self, message: str, failed_rules: list[str] | None = None, **details):
        super().__init__(message, **details)
        self.failed_rules = list(failed_rules or [])


class CycleIntroducedError(EdgeRejectedError):
    code = "cycle-introduced"


class DuplicateEdgeError(EdgeRejectedError):
    code = "duplicate-edge"


class RuleViolationError(EdgeRejectedError):
    code = "rule-violation"


class CycleDetectedError(OrchestratorError):
    code = "cycle-detected"


class InvalidPipelineError(OrchestratorError):
    def __init__(self, message: str, report=None, **details):
        super().__init__(message, **details)
        self.report = report

    code = "invalid-pipeline"


class InputKindMismatchError(OrchestratorError):
    code = "input-kind-mismatch"


class KindMismatchError(OrchestratorError):
    code = "kind-mismatch"


class NodeFailureError(OrchestratorError):
    """A node aborted the run; ``trace`` keeps the completed prefix."""

    code = "node-failure"

    def __init__(self, message: str, node_id: str, cause: Exception | None = None, trace=None):
        super().__init__(message, node_id=node_id)
        self.node_id = node_id
        self.cause = cause
        self.trace = trace


class HttpStatusError(OrchestratorError):
    code = "http-error"

    def __init__(self, message: str, status: int, **details):
        super().__init__(message, status=status, **details)
        self.status = status


class TransportError(OrchestratorError):
    code = "transport-error"


class MalformedResponseError(OrchestratorError):
    code = "malformed-response"


class DuplicateModelError(OrchestratorError):
    code = "duplicate-name-version"


class InvalidEntryError(OrchestratorError):
    code = "invalid-entry"


class NotFoundError(OrchestratorError):
    code = "not-found"


class StorageError(OrchestratorError):
    code = "storage-failure"


class InsufficientRowsError(OrchestratorError):
    code = "insufficient-rows"


class MockUnreachableError(OrchestratorError):
    code = "mock-unreachable"


class BenchValidationError(OrchestratorError):
    """A benchmark-constructed chain failed validation; always a harness bug."""

    code = "validation-failure"
