// Document shapes exchanged with the gateway. Keep these in sync with the
// service's JSON responses; the zod schemas below are parsed at the client
// boundary so drift fails loudly instead of propagating `any`.
import { z } from "zod";

export type Task = "asr" | "mt" | "tts" | "ocr";
export type NodeKind = "input" | Task | "adapter" | "output";
export type PayloadKind = "text" | "audio" | "image";

export interface NodeDoc {
  id: string;
  kind: NodeKind;
  properties: Record<string, string>;
  model_ref: string | null;
  insertion_index: number;
}

export interface EdgeDoc {
  source: string;
  target: string;
}

export interface PipelineDoc {
  id: string;
  name: string;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface PayloadDoc {
  kind: PayloadKind;
  data: string;
  metadata: Record<string, unknown>;
  format?: string;
}

const nodeKindSchema = z.enum([
  "input",
  "asr",
  "mt",
  "tts",
  "ocr",
  "adapter",
  "output",
]);

export const nodeDocSchema = z.object({
  id: z.string(),
  kind: nodeKindSchema,
  properties: z.record(z.string(), z.string()),
  model_ref: z.string().nullable(),
  insertion_index: z.number().int(),
});

export const pipelineDocSchema = z.object({
  id: z.string(),
  name: z.string(),
  nodes: z.array(nodeDocSchema),
  edges: z.array(z.object({ source: z.string(), target: z.string() })),
});

// mt entries carry ordered [source, target] pairs; everything else a flat
// language list.
export const modelDocSchema = z.object({
  id: z.string(),
  name: z.string(),
  version: z.string(),
  task: z.enum(["asr", "mt", "tts", "ocr"]),
  supported_pairs: z.union([
    z.array(z.tuple([z.string(), z.string()])),
    z.array(z.string()),
  ]),
  backend: z.string(),
  endpoint: z.string().nullable(),
  request_template: z.object({
    method: z.string(),
    path: z.string(),
    payload_field: z.string(),
    response_field: z.string(),
  }),
  input_kind: z.enum(["text", "audio", "image"]),
  output_kind: z.enum(["text", "audio", "image"]),
});

export type ModelDoc = z.infer<typeof modelDocSchema>;

/** Body for POST /models; the service fills defaults and derives port kinds. */
export interface ModelRegistration {
  name: string;
  version: string;
  task: Task;
  supported_pairs: [string, string][] | string[];
  endpoint: string;
}

export const gatewayVerdictSchema = z.object({
  valid: z.boolean(),
  failed_rules: z.array(z.string()),
});

export type GatewayVerdict = z.infer<typeof gatewayVerdictSchema>;

export const registeredSchema = z.object({ id: z.string() });
export const savedSchema = z.object({ endpoint_id: z.string() });

export const pipelineSummarySchema = z.object({
  endpoint_id: z.string(),
  name: z.string(),
  description: z.string(),
  created_at: z.string(),
  node_count: z.number().int(),
});

export type PipelineSummary = z.infer<typeof pipelineSummarySchema>;

export const savedPipelineSchema = z.object({
  endpoint_id: z.string(),
  description: z.string(),
  created_at: z.string(),
  pipeline: pipelineDocSchema,
});

export type SavedPipelineDoc = z.infer<typeof savedPipelineSchema>;

export const payloadDocSchema = z.object({
  kind: z.enum(["text", "audio", "image"]),
  data: z.string(),
  metadata: z.record(z.string(), z.unknown()),
  format: z.string().optional(),
});

export const nodeTimingSchema = z.object({
  node_id: z.string(),
  started_at: z.number(),
  finished_at: z.number(),
  model_ms: z.number(),
  node_overhead_ms: z.number(),
});

export const traceDocSchema = z.object({
  pipeline_id: z.string(),
  nodes: z.array(nodeTimingSchema),
  total_ms: z.number(),
  model_ms: z.number(),
  overhead_ms: z.number(),
});

export type TraceDoc = z.infer<typeof traceDocSchema>;

export const runResultSchema = z.object({
  output: payloadDocSchema,
  trace: traceDocSchema,
});

export type RunResult = z.infer<typeof runResultSchema>;

export const violationSchema = z.object({
  code: z.string(),
  node_ids: z.array(z.string()),
  rule_name: z.string().nullable(),
  message: z.string(),
});

export const validationReportSchema = z.object({
  ok: z.boolean(),
  violations: z.array(violationSchema),
});

export type ValidationReportDoc = z.infer<typeof validationReportSchema>;

export const healthSchema = z.object({
  status: z.string(),
  models: z.number().int(),
  pipelines: z.number().int(),
});

export const errorBodySchema = z.object({
  code: z.string(),
  message: z.string(),
  details: z.record(z.string(), z.unknown()).optional(),
});

export type ErrorBody = z.infer<typeof errorBodySchema>;
