"""Edge validation: boolean rules over the property sets of an edge's endpoints.

A rule either applies to an edge and votes true/false, or does not apply and
defaults to true. A missing property that a rule declares as required always
evaluates to false. An edge may exist only if every rule in the set passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, TYPE_CHECKING

from .graph import DataKind, MODEL_KINDS, MODEL_PORTS, Node, NodeKind

if TYPE_CHECKING:
    from .hub import ModelEntry

ModelLookup = Callable[[str], Optional["ModelEntry"]]

# Sentinel distinguishing "no constraint on this side" (None) from
# "the property the rule needs is absent" (fails the rule).
_MISSING = object()


@dataclass(frozen=True)
class LanguagePair:
    source_lang: str
    target_lang: str

    def __post_init__(self):
        if not self.source_lang or not self.target_lang:
            raise ValueError("language tags must be nonempty")


@dataclass(frozen=True)
class Rule:
    """Named boolean constraint over a candidate edge's endpoints.

    If ``required_source_property``/``required_target_property`` is set and
    absent from the respective node, evaluation is false without consulting
    the constraint. Constraints themselves return true for edges they do
    not apply to.
    """

    name: str
    constraint: Callable[[Node, Node], bool]
    required_source_property: Optional[str] = None
    required_target_property: Optional[str] = None

    def evaluate(self, source: Node, target: Node) -> bool:
        if (
            self.required_source_property is not None
            and self.required_source_property not in source.properties
        ):
            return False
        if (
            self.required_target_property is not None
            and self.required_target_property not in target.properties
        ):
            return False
        return bool(self.constraint(source, target))


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate rule names in {names}")

    def can_edge_exist(self, source: Node, target: Node) -> bool:
        for rule in self.rules:
            if not rule.evaluate(source, target):
                return False
        return True

    def failing(self, source: Node, target: Node) -> list[str]:
        """Names of every rule the edge violates (no short-circuit)."""
        return [r.name for r in self.rules if not r.evaluate(source, target)]


def evaluate_rule(rule: Rule, source: Node, target: Node) -> bool:
    return rule.evaluate(source, target)


def can_edge_exist(source: Node, target: Node, rules: RuleSet) -> bool:
    return rules.can_edge_exist(source, target)


# -- the compiled-in rule set for the language-service deployment ---------

_MODEL_TARGETS = {
    NodeKind.ASR: (NodeKind.MT, NodeKind.TTS),
    NodeKind.OCR: (NodeKind.MT, NodeKind.TTS),
    NodeKind.MT: (NodeKind.MT, NodeKind.TTS),
    NodeKind.TTS: (NodeKind.ASR,),
}

_LANG_EXEMPT = (NodeKind.ADAPTER, NodeKind.OUTPUT)


def _declared_data_kind(node: Node):
    try:
        return DataKind(node.properties.get("data_kind"))
    except ValueError:
        return _MISSING


def _adapter_port_kind(node: Node):
    transform = node.properties.get("transform")
    if transform == "identity":
        return None
    if transform == "text_cleanup":
        return DataKind.TEXT
    return _MISSING


def _output_kind(node: Node):
    if node.kind in MODEL_KINDS:
        return MODEL_PORTS[node.kind][1]
    if node.kind == NodeKind.INPUT:
        return _declared_data_kind(node)
    if node.kind == NodeKind.ADAPTER:
        return _adapter_port_kind(node)
    return None


def _input_kind(node: Node):
    if node.kind in MODEL_KINDS:
        return MODEL_PORTS[node.kind][0]
    if node.kind == NodeKind.ADAPTER:
        return _adapter_port_kind(node)
    # Output sinks accept anything; input nodes have no inbound port, and
    # edges into them die on the cycle/reachability checks instead.
    return None


def _kind_compatible(source: Node, target: Node) -> bool:
    if source.kind == NodeKind.ADAPTER:
        return True
    if source.kind == NodeKind.INPUT:
        if target.kind not in MODEL_KINDS:
            return False
        return _declared_data_kind(source) == MODEL_PORTS[target.kind][0]
    if source.kind in MODEL_KINDS:
        if target.kind in (NodeKind.ADAPTER, NodeKind.OUTPUT):
            return True
        return target.kind in _MODEL_TARGETS[source.kind]
    return False


def _datatype_compatible(source: Node, target: Node) -> bool:
    produced = _output_kind(source)
    if produced is _MISSING:
        return False
    consumed = _input_kind(target)
    if consumed is _MISSING:
        return False
    if produced is None or consumed is None:
        return True
    return produced == consumed


def _required_input_lang(node: Node):
    if node.kind == NodeKind.MT:
        return node.properties.get("source_lang", _MISSING)
    if node.kind in MODEL_KINDS:
        return node.properties.get("lang", _MISSING)
    return None


def _effective_output_lang(node: Node):
    if node.kind == NodeKind.MT:
        return node.properties.get("target_lang", _MISSING)
    if node.kind in MODEL_KINDS:
        return node.properties.get("lang", _MISSING)
    return None


def _make_language_constraint(model_lookup: Optional[ModelLookup]):
    def language_compatible(source: Node, target: Node) -> bool:
        if source.kind in _LANG_EXEMPT or target.kind in _LANG_EXEMPT:
            return True
        if target.kind == NodeKind.INPUT:
            return True
        target_lang = _required_input_lang(target)
        if target_lang is _MISSING:
            return False
        if source.kind == NodeKind.INPUT:
            # Only a text input with an explicit lang tag constrains its successor.
            if source.properties.get("data_kind") != DataKind.TEXT.value:
                return True
            source_lang = source.properties.get("lang")
            if source_lang is None:
                return True
        else:
            source_lang = _effective_output_lang(source)
            if source_lang is _MISSING:
                return False
        if source_lang != target_lang:
            return False
        return _registered_model_supports(target, model_lookup)

    return language_compatible


def _registered_model_supports(target: Node, model_lookup: Optional[ModelLookup]) -> bool:
    """Check the target's hub entry supports the languages its node declares.

    Without a lookup (or when the referenced entry is absent) this clause
    does not apply; run-time resolution will surface dangling refs.
    """
    if model_lookup is None or not target.model_ref:
        return True
    entry = model_lookup(target.model_ref)
    if entry is None:
        return True
    if entry.task != target.kind.value:
        return False
    if target.kind == NodeKind.MT:
        source_lang = target.properties.get("source_lang")
        target_lang = target.properties.get("target_lang")
        if not source_lang or not target_lang:
            return False
        return entry.supports_pair(source_lang, target_lang)
    lang = target.properties.get("lang")
    return bool(lang) and entry.supports_lang(lang)


def bhashini_ruleset(model_lookup: Optional[ModelLookup] = None) -> RuleSet:
    """The production rule set: kind, datatype, and language compatibility.

    ``model_lookup`` resolves a node's model_ref to its hub entry so the
    language rule can also reject models that do not serve the declared
    language combination; omit it to validate structure alone.
    """
    return RuleSet(
        rules=(
            Rule(name="kind-compatibility", constraint=_kind_compatible),
            Rule(name="datatype-compatibility", constraint=_datatype_compatible),
            Rule(
                name="language-compatibility",
                constraint=_make_language_constraint(model_lookup),
            ),
        )
    )
