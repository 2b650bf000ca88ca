// Thin typed client for the gateway REST API. Response bodies are validated
// with zod at the boundary; HTTP errors become GatewayError, network failures
// become OfflineError. All designer state lives elsewhere — this module only
// speaks HTTP.
import type { z } from "zod";
import {
  errorBodySchema,
  gatewayVerdictSchema,
  healthSchema,
  modelDocSchema,
  pipelineSummarySchema,
  registeredSchema,
  runResultSchema,
  savedPipelineSchema,
  savedSchema,
  type GatewayVerdict,
  type ModelDoc,
  type ModelRegistration,
  type PayloadDoc,
  type PipelineDoc,
  type PipelineSummary,
  type RunResult,
  type SavedPipelineDoc,
} from "./types.js";

/** Minimal fetch signature so tests can substitute a replay transport. */
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** The gateway answered with a non-2xx status. */
export class GatewayError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details?: Record<string, unknown>,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

/** The gateway could not be reached at all. */
export class OfflineError extends Error {
  constructor(message: string, readonly cause?: unknown) {
    super(message);
    this.name = "OfflineError";
  }
}

export interface ModelFilter {
  task?: string;
  source_lang?: string;
  target_lang?: string;
}

export class GatewayClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  registerModel(entry: ModelRegistration): Promise<{ id: string }> {
    return this.request(registeredSchema, "POST", "/models", entry);
  }

  listModels(filter: ModelFilter = {}): Promise<ModelDoc[]> {
    const query = new URLSearchParams();
    if (filter.task) query.set("task", filter.task);
    if (filter.source_lang) query.set("source_lang", filter.source_lang);
    if (filter.target_lang) query.set("target_lang", filter.target_lang);
    const suffix = query.size ? `?${query.toString()}` : "";
    return this.request(modelDocSchema.array(), "GET", `/models${suffix}`);
  }

  getModel(id: string): Promise<ModelDoc> {
    return this.request(modelDocSchema, "GET", `/models/${id}`);
  }

  validateEdge(
    pipeline: PipelineDoc,
    source: string,
    target: string,
    signal?: AbortSignal,
  ): Promise<GatewayVerdict> {
    return this.request(
      gatewayVerdictSchema,
      "POST",
      "/pipelines/validate-edge",
      { pipeline, source, target },
      signal,
    );
  }

  savePipeline(
    pipeline: PipelineDoc,
    description = "",
  ): Promise<{ endpoint_id: string }> {
    return this.request(savedSchema, "POST", "/pipelines", {
      pipeline,
      description,
    });
  }

  listPipelines(): Promise<PipelineSummary[]> {
    return this.request(pipelineSummarySchema.array(), "GET", "/pipelines");
  }

  getPipeline(endpointId: string): Promise<SavedPipelineDoc> {
    return this.request(savedPipelineSchema, "GET", `/pipelines/${endpointId}`);
  }

  /** Test a pipeline without saving it. */
  execute(pipeline: PipelineDoc, input: PayloadDoc): Promise<RunResult> {
    return this.request(runResultSchema, "POST", "/execute", {
      pipeline,
      input,
    });
  }

  runSaved(endpointId: string, input: PayloadDoc): Promise<RunResult> {
    return this.request(runResultSchema, "POST", `/run/${endpointId}`, input);
  }

  health(): Promise<z.infer<typeof healthSchema>> {
    return this.request(healthSchema, "GET", "/health");
  }

  private async request<S extends z.ZodType>(
    schema: S,
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<z.infer<S>> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      });
    } catch (err) {
      // Aborts belong to the caller's gesture handling, not connectivity.
      if (err instanceof Error && err.name === "AbortError") throw err;
      throw new OfflineError(`gateway unreachable at ${this.baseUrl}`, err);
    }

    const text = await response.text();
    if (!response.ok) {
      // Error bodies may come from a proxy rather than the gateway, so a
      // non-JSON (or unshaped) body degrades to the bare status code.
      let body: unknown = null;
      try {
        body = text ? JSON.parse(text) : null;
      } catch {
        body = null;
      }
      const error = errorBodySchema.safeParse(body);
      if (error.success) {
        throw new GatewayError(
          response.status,
          error.data.code,
          error.data.message,
          error.data.details,
        );
      }
      throw new GatewayError(response.status, `http-${response.status}`, text);
    }

    let parsed: unknown;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      throw new GatewayError(
        response.status,
        "invalid-json",
        `gateway returned non-JSON (status ${response.status})`,
      );
    }
    return schema.parse(parsed) as z.infer<S>;
  }
}
