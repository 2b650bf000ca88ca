"""Benchmark figure rendering: runtime composition and the overhead fit."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchRow, LinearFit


def save_benchmark_figure(
    rows: list[BenchRow],
    fit: LinearFit | None,
    path: str | Path,
    title: str = "Pipeline runtime vs chain length",
) -> Path:
    """Render the measured rows (and the linear overhead fit) to an image file."""
    ns = [r.n_models for r in rows]
    fig, (ax_runtime, ax_overhead) = plt.subplots(1, 2, figsize=(11, 4.2))

    ax_runtime.plot(ns, [r.total_ms for r in rows], "o-", label="total")
    ax_runtime.plot(ns, [r.model_ms for r in rows], "s--", label="model")
    ax_runtime.set_xlabel("# models")
    ax_runtime.set_ylabel("runtime (ms)")
    ax_runtime.set_title(title)
    ax_runtime.legend()
    ax_runtime.grid(True, alpha=0.3)

    ax_overhead.plot(ns, [r.overhead_ms for r in rows], "o", label="overhead")
    if fit is not None:
        xs = [min(ns), max(ns)]
        ax_overhead.plot(
            xs,
            [fit.slope_ms_per_model * x + fit.intercept_ms for x in xs],
            "-",
            label=f"fit: {fit.slope_ms_per_model:.2f} ms/model, r²={fit.r2:.3f}",
        )
    ax_overhead.set_xlabel("# models")
    ax_overhead.set_ylabel("orchestration overhead (ms)")
    ax_overhead.set_title("Overhead scaling")
    ax_overhead.legend()
    ax_overhead.grid(True, alpha=0.3)

    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
