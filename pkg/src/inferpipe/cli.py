"""Command line interface: serve the gateway, run benchmarks, check rules."""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click

from . import bench as bench_mod
from .errors import OrchestratorError
from .figures import save_benchmark_figure
from .graph import PipelineGraph
from .hub import ModelHub
from .mocks import MockSpec, serve_mocks
from .rules import bhashini_ruleset


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Build, validate, store, serve, and benchmark ML inference pipelines."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--hub-dir", default="./hub", show_default=True, type=click.Path())
@click.option("--store-dir", default="./pipelines", show_default=True, type=click.Path())
@click.option("--model-timeout", default=120.0, show_default=True, type=float,
              help="Per model call timeout in seconds.")
def serve(host: str, port: int, hub_dir: str, store_dir: str, model_timeout: float):
    """Run the REST gateway."""
    import uvicorn

    from .gateway import create_app

    app = create_app(hub_dir=hub_dir, store_dir=store_dir, model_timeout=model_timeout)
    uvicorn.run(app, host=host, port=port, log_level="info")


# -- benchmark ------------------------------------------------------------


@main.group()
def bench():
    """Overhead benchmarks against deterministic mock model servers."""


def _parse_counts(raw: str) -> list[int]:
    try:
        counts = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"counts must be comma-separated integers, got {raw!r}")
    if not counts or any(c < 1 for c in counts):
        raise click.BadParameter("counts must be positive")
    return counts


def _print_rows(rows):
    click.echo(f"{'n_models':>9} {'total_ms':>12} {'model_ms':>12} {'overhead_ms':>12} {'trials':>7}")
    for r in rows:
        click.echo(
            f"{r.n_models:>9} {r.total_ms:>12.3f} {r.model_ms:>12.3f} {r.overhead_ms:>12.3f} {r.trials:>7}"
        )


def _print_fit(fit):
    click.echo(
        f"overhead fit: {fit.slope_ms_per_model:.3f} ms/model "
        f"+ {fit.intercept_ms:.3f} ms, r2={fit.r2:.4f}"
    )


@bench.command("run")
@click.option("--task", type=click.Choice(bench_mod.BENCH_TASKS), default="mt", show_default=True)
@click.option("--counts", default="1,2,4,8,16", show_default=True,
              help="Chain lengths (pair counts for asr-tts).")
@click.option("--latency-ms", default=200.0, show_default=True, type=float)
@click.option("--trials", default=5, show_default=True, type=int)
@click.option("--out", "out_path", default="results.csv", show_default=True, type=click.Path())
@click.option("--fig", "fig_path", default=None, type=click.Path(),
              help="Figure output path [default: <out> with .png suffix].")
@click.option("--no-fig", is_flag=True, help="Skip figure rendering.")
def bench_run(task, counts, latency_ms, trials, out_path, fig_path, no_fig):
    """Measure runtime decomposition across chain lengths; write CSV + figure."""
    rows = bench_mod.run_chain_benchmark(
        task=task, counts=_parse_counts(counts), latency_ms=latency_ms, trials=trials
    )
    _print_rows(rows)
    bench_mod.write_rows(rows, out_path)
    click.echo(f"wrote {out_path}")
    fit = None
    if len({r.n_models for r in rows}) >= 2:
        fit = bench_mod.fit_linear_overhead(rows)
        _print_fit(fit)
    if not no_fig:
        target = Path(fig_path) if fig_path else Path(out_path).with_suffix(".png")
        save_benchmark_figure(rows, fit, target, title=f"{task} chains")
        click.echo(f"wrote {target}")


@bench.command("fit")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--fig", "fig_path", default=None, type=click.Path(),
              help="Also render the rows and fit line to this image file.")
def bench_fit(in_path, fig_path):
    """Fit overhead against model count for a previously written CSV."""
    rows = bench_mod.read_rows(in_path)
    _print_rows(rows)
    fit = bench_mod.fit_linear_overhead(rows)
    _print_fit(fit)
    if fig_path:
        save_benchmark_figure(rows, fit, fig_path)
        click.echo(f"wrote {fig_path}")


@bench.command("mocks")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True),
              help="JSON list of {task, latency_ms, port} entries.")
def bench_mocks(spec_path):
    """Run mock model servers until interrupted."""
    specs = [MockSpec.from_dict(doc) for doc in json.loads(Path(spec_path).read_text())]
    servers = serve_mocks(specs)
    for spec, server in zip(specs, servers):
        click.echo(f"serving {spec.task or 'all tasks'} on {server.base_url} "
                   f"(latency {spec.latency_ms} ms)")
    try:
        while True:
            time.sleep(1)
    except KeyboardInterrupt:
        click.echo("stopping")
    finally:
        for server in servers:
            server.stop()


# -- rule diagnostics -----------------------------------------------------


@main.group()
def rules():
    """Edge rule diagnostics."""


@rules.command("check")
@click.argument("pipeline_file", type=click.Path(exists=True))
@click.option("--hub-dir", default=None, type=click.Path(),
              help="Hub directory for language-support lookups.")
def rules_check(pipeline_file, hub_dir):
    """Print per-edge pass/fail with failed rule names for a pipeline document."""
    try:
        pipeline = PipelineGraph.from_dict(json.loads(Path(pipeline_file).read_text()))
    except (ValueError, KeyError, OrchestratorError) as exc:
        raise click.ClickException(f"cannot read pipeline: {exc}")
    lookup = ModelHub(hub_dir).find if hub_dir else None
    ruleset = bhashini_ruleset(lookup)
    any_failed = False
    for edge in pipeline.edges:
        failed = ruleset.failing(pipeline.node(edge.source), pipeline.node(edge.target))
        if failed:
            any_failed = True
            click.echo(f"FAIL {edge.source} -> {edge.target}: {', '.join(failed)}")
        else:
            click.echo(f"ok   {edge.source} -> {edge.target}")
    if any_failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
