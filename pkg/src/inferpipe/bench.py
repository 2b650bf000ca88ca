"""Orchestration overhead benchmark.

Builds chains of translation or speech models against deterministic mock
servers, executes them repeatedly, and reduces the traces to per-chain-length
rows (CSV) plus an ordinary least squares fit of overhead against the number
of models.
"""

from __future__ import annotations

import csv
import gc
import logging
import statistics
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import BenchValidationError, InsufficientRowsError, MockUnreachableError
from .executor import Payload, execute
from .graph import DataKind, Node, NodeKind, PipelineGraph, validate_pipeline
from .hub import ModelEntry, ModelHub
from .mocks import MockModelServer, TTS_AUDIO_PREFIX
from .rules import LanguagePair, RuleSet, bhashini_ruleset

log = logging.getLogger(__name__)

BENCH_TASKS = ("mt", "asr-tts")
_BENCH_TEXT = "the quick brown fox"


@dataclass(frozen=True)
class BenchRow:
    """Mean timings over ``trials`` runs of one chain length."""

    n_models: int
    total_ms: float
    model_ms: float
    overhead_ms: float
    trials: int


@dataclass(frozen=True)
class LinearFit:
    slope_ms_per_model: float
    intercept_ms: float
    r2: float

    def to_dict(self) -> dict:
        return {
            "slope_ms_per_model": self.slope_ms_per_model,
            "intercept_ms": self.intercept_ms,
            "r2": self.r2,
        }


# -- chain construction ---------------------------------------------------


def _mt_pair(position: int) -> tuple[str, str]:
    # Chained translators must agree on languages, so alternate directions.
    return ("en", "hi") if position % 2 == 0 else ("hi", "en")


def register_mt_models(hub: ModelHub, server: MockModelServer) -> dict[tuple[str, str], str]:
    ids = {}
    for src, tgt in (("en", "hi"), ("hi", "en")):
        ids[(src, tgt)] = hub.register(
            ModelEntry(
                name=f"mock-mt-{src}-{tgt}",
                version="1",
                task="mt",
                supported_pairs=(LanguagePair(src, tgt),),
                endpoint=server.endpoint_for("mt", f"{src}-{tgt}"),
            )
        )
    return ids


def register_speech_models(
    hub: ModelHub, server: MockModelServer, lang: str = "en"
) -> tuple[str, str]:
    asr_id = hub.register(
        ModelEntry(
            name="mock-asr",
            version="1",
            task="asr",
            supported_pairs=(lang,),
            endpoint=server.endpoint_for("asr", lang),
        )
    )
    tts_id = hub.register(
        ModelEntry(
            name="mock-tts",
            version="1",
            task="tts",
            supported_pairs=(lang,),
            endpoint=server.endpoint_for("tts", lang),
        )
    )
    return asr_id, tts_id


def build_mt_chain(
    pipeline_id: str,
    n_models: int,
    model_ids: dict[tuple[str, str], str],
    rules: RuleSet,
) -> PipelineGraph:
    """input → mt_1 → … → mt_n → output, alternating translation directions."""
    graph = PipelineGraph(id=pipeline_id, name=f"mt-chain-{n_models}")
    graph = graph.add_node(
        Node(id="in", kind=NodeKind.INPUT, properties={"data_kind": "text", "source": "upload", "lang": "en"})
    )
    previous = "in"
    for i in range(n_models):
        src, tgt = _mt_pair(i)
        node_id = f"mt{i + 1}"
        graph = graph.add_node(
            Node(
                id=node_id,
                kind=NodeKind.MT,
                properties={"source_lang": src, "target_lang": tgt},
                model_ref=model_ids[(src, tgt)],
            )
        )
        graph = graph.add_edge(previous, node_id, rules)
        previous = node_id
    graph = graph.add_node(Node(id="out", kind=NodeKind.OUTPUT))
    return graph.add_edge(previous, "out", rules)


def build_asr_tts_chain(
    pipeline_id: str,
    n_pairs: int,
    asr_id: str,
    tts_id: str,
    rules: RuleSet,
    lang: str = "en",
) -> PipelineGraph:
    """input → (asr → tts) × n_pairs → output on one language.

    Speech chains must alternate: recognizers emit text, synthesizers emit
    audio, so same-kind neighbors would never type-check.
    """
    graph = PipelineGraph(id=pipeline_id, name=f"asr-tts-chain-{n_pairs}")
    graph = graph.add_node(
        Node(id="in", kind=NodeKind.INPUT, properties={"data_kind": "audio", "source": "upload"})
    )
    previous = "in"
    for i in range(n_pairs):
        asr_node = f"asr{i + 1}"
        tts_node = f"tts{i + 1}"
        graph = graph.add_node(
            Node(id=asr_node, kind=NodeKind.ASR, properties={"lang": lang}, model_ref=asr_id)
        )
        graph = graph.add_edge(previous, asr_node, rules)
        graph = graph.add_node(
            Node(id=tts_node, kind=NodeKind.TTS, properties={"lang": lang}, model_ref=tts_id)
        )
        graph = graph.add_edge(asr_node, tts_node, rules)
        previous = tts_node
    graph = graph.add_node(Node(id="out", kind=NodeKind.OUTPUT))
    return graph.add_edge(previous, "out", rules)


# -- measurement ----------------------------------------------------------


def check_mock_reachable(server_url: str):
    try:
        response = requests.get(f"{server_url}/health", timeout=5)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise MockUnreachableError(f"mock server at {server_url} is unreachable: {exc}") from exc


def run_chain_benchmark(
    task: str,
    counts: list[int],
    latency_ms: float = 200.0,
    trials: int = 5,
    server: MockModelServer | None = None,
) -> list[BenchRow]:
    """Measure mean runtime decomposition for each chain length in ``counts``.

    For the speech task, counts are pair counts (two model nodes per pair).
    Builds every chain through the normal builder path and validates it with
    the production rule set before running.
    """
    if task not in BENCH_TASKS:
        raise ValueError(f"task must be one of {BENCH_TASKS}, got {task!r}")
    own_server = server is None
    if own_server:
        server = MockModelServer(latency_ms=latency_ms).start()
    try:
        check_mock_reachable(server.base_url)
        hub = ModelHub()
        rules = bhashini_ruleset(hub.find)
        if task == "mt":
            model_ids = register_mt_models(hub, server)
            payload = Payload.text(_BENCH_TEXT)
        else:
            asr_id, tts_id = register_speech_models(hub, server)
            payload = Payload.from_bytes(
                DataKind.AUDIO, TTS_AUDIO_PREFIX + _BENCH_TEXT.encode("utf-8"), "wav"
            )

        rows = []
        for count in counts:
            if task == "mt":
                chain = build_mt_chain(f"bench-mt-{count}", count, model_ids, rules)
                n_models = count
            else:
                chain = build_asr_tts_chain(f"bench-asr-tts-{count}", count, asr_id, tts_id, rules)
                n_models = 2 * count
            report = validate_pipeline(chain, rules)
            if not report.ok:
                raise BenchValidationError(
                    f"constructed chain {chain.id!r} failed validation: {report.codes()}"
                )
            # Collector pauses from unrelated allocations can dwarf the
            # sub-millisecond per-node overhead, so measure without them.
            totals, models = [], []
            gc.collect()
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                for _ in range(trials):
                    _, trace = execute(chain, payload, hub, rules=rules)
                    totals.append(trace.total_ms)
                    models.append(trace.model_ms)
            finally:
                if gc_was_enabled:
                    gc.enable()
            total = statistics.fmean(totals)
            model = statistics.fmean(models)
            rows.append(
                BenchRow(
                    n_models=n_models,
                    total_ms=total,
                    model_ms=model,
                    overhead_ms=total - model,
                    trials=trials,
                )
            )
            log.info(
                "%s chain n=%d: total=%.1fms model=%.1fms overhead=%.1fms",
                task, n_models, total, model, total - model,
            )
        return rows
    finally:
        if own_server:
            server.stop()


def fit_linear_overhead(rows: list[BenchRow]) -> LinearFit:
    """Ordinary least squares of overhead_ms against n_models."""
    xs = [float(r.n_models) for r in rows]
    ys = [r.overhead_ms for r in rows]
    if len(rows) < 2 or len(set(xs)) < 2:
        raise InsufficientRowsError(
            f"need at least two rows with distinct model counts, got {len(rows)}"
        )
    slope, intercept = statistics.linear_regression(xs, ys)
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    mean_y = statistics.fmean(ys)
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return LinearFit(slope_ms_per_model=slope, intercept_ms=intercept, r2=r2)


# -- CSV ------------------------------------------------------------------

CSV_COLUMNS = ("n_models", "total_ms", "model_ms", "overhead_ms", "trials")


def write_rows(rows: list[BenchRow], path: str | Path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.n_models, f"{r.total_ms:.3f}", f"{r.model_ms:.3f}",
                             f"{r.overhead_ms:.3f}", r.trials])


def read_rows(path: str | Path) -> list[BenchRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for record in csv.DictReader(handle):
            rows.append(
                BenchRow(
                    n_models=int(record["n_models"]),
                    total_ms=float(record["total_ms"]),
                    model_ms=float(record["model_ms"]),
                    overhead_ms=float(record["overhead_ms"]),
                    trials=int(record["trials"]),
                )
            )
    return rows
