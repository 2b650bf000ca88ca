// View helpers for the run-result pane and inline validation markers.
import type { TraceDoc, ValidationReportDoc } from "./types.js";

export interface TimingBar {
  node_id: string;
  model_ms: number;
  overhead_ms: number;
  duration_ms: number;
  /** Fraction of the whole pipeline runtime, for bar widths. */
  share: number;
}

export function traceBars(trace: TraceDoc): TimingBar[] {
  return trace.nodes.map((t) => {
    const duration = t.finished_at - t.started_at;
    return {
      node_id: t.node_id,
      model_ms: t.model_ms,
      overhead_ms: t.node_overhead_ms,
      duration_ms: duration,
      share: trace.total_ms > 0 ? duration / trace.total_ms : 0,
    };
  });
}

export interface ViolationMarkers {
  /** Violation codes to render on specific nodes. */
  nodes: Record<string, string[]>;
  /** Violations that name no node (e.g. a missing input). */
  pipeline: string[];
}

export function violationMarkers(report: ValidationReportDoc): ViolationMarkers {
  const nodes: Record<string, string[]> = {};
  const pipeline: string[] = [];
  for (const violation of report.violations) {
    if (violation.node_ids.length === 0) {
      pipeline.push(violation.code);
      continue;
    }
    for (const id of violation.node_ids) {
      (nodes[id] ??= []).push(violation.code);
    }
  }
  return { nodes, pipeline };
}
