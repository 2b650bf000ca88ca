// Canvas state for the pipeline designer. Nodes and positions are local;
// every edge verdict comes from the gateway (rules are never evaluated
// client-side), and only gateway-approved edges are drawn.
import { GatewayClient, OfflineError } from "./client.js";
import { canonicalJson } from "./json.js";
import type {
  EdgeDoc,
  GatewayVerdict,
  NodeDoc,
  NodeKind,
  PipelineDoc,
} from "./types.js";

export interface Position {
  x: number;
  y: number;
}

export interface CanvasNode {
  node: NodeDoc;
  position: Position;
  selected: boolean;
}

/** A gateway validate-edge response plus when and for which gesture it was fetched. */
export interface EdgeVerdict {
  source: string;
  target: string;
  valid: boolean;
  failed_rules: string[];
  fetched_at: string;
}

export type ConnectOutcome =
  | { kind: "connected"; verdict: EdgeVerdict }
  /** No edge drawn; render a badge listing `verdict.failed_rules`. */
  | { kind: "rejected"; verdict: EdgeVerdict }
  /** The gesture was undone before the gateway answered. */
  | { kind: "cancelled" }
  /** Gateway unreachable; no edge drawn. `retry` re-runs the gesture. */
  | { kind: "offline"; retry: () => Promise<ConnectOutcome> };

export interface NodeInit {
  id: string;
  kind: NodeKind;
  properties?: Record<string, string>;
  model_ref?: string | null;
}

export interface PositionsSidecar {
  pipeline_id: string;
  positions: Record<string, Position>;
}

export class DesignerCanvas {
  readonly id: string;
  name: string;

  private readonly client: GatewayClient;
  private readonly canvasNodes: CanvasNode[] = [];
  private readonly canvasEdges: EdgeDoc[] = [];
  private nextIndex = 0;
  private readonly verdictCache = new Map<string, EdgeVerdict>();
  private readonly pending = new Map<string, AbortController>();
  /** Every verdict fetched this session, in order. */
  readonly verdictLog: EdgeVerdict[] = [];

  constructor(client: GatewayClient, opts: { id: string; name?: string }) {
    this.client = client;
    this.id = opts.id;
    this.name = opts.name ?? "";
  }

  /**
   * Rehydrate a canvas from a saved pipeline document. The document already
   * passed gateway validation, so its edges are restored without re-querying.
   */
  static fromPipeline(
    client: GatewayClient,
    doc: PipelineDoc,
    sidecar?: PositionsSidecar,
  ): DesignerCanvas {
    const canvas = new DesignerCanvas(client, { id: doc.id, name: doc.name });
    for (const node of doc.nodes) {
      canvas.canvasNodes.push({
        node: { ...node, properties: { ...node.properties } },
        position:
          sidecar?.positions[node.id] ?? canvas.defaultPosition(canvas.canvasNodes.length),
        selected: false,
      });
      canvas.nextIndex = Math.max(canvas.nextIndex, node.insertion_index + 1);
    }
    for (const edge of doc.edges) {
      canvas.canvasEdges.push({ ...edge });
    }
    return canvas;
  }

  nodes(): readonly CanvasNode[] {
    return this.canvasNodes;
  }

  edges(): readonly EdgeDoc[] {
    return this.canvasEdges;
  }

  node(id: string): CanvasNode | undefined {
    return this.canvasNodes.find((n) => n.node.id === id);
  }

  addNode(init: NodeInit, position?: Position): CanvasNode {
    if (this.node(init.id)) {
      throw new Error(`node ${init.id} already on canvas`);
    }
    const placed: CanvasNode = {
      node: {
        id: init.id,
        kind: init.kind,
        properties: { ...(init.properties ?? {}) },
        model_ref: init.model_ref ?? null,
        insertion_index: this.nextIndex++,
      },
      position: position ?? this.defaultPosition(this.canvasNodes.length),
      selected: false,
    };
    this.canvasNodes.push(placed);
    return placed;
  }

  /** Drops the node, its edges, and any in-flight gestures touching it. */
  removeNode(id: string): void {
    const at = this.canvasNodes.findIndex((n) => n.node.id === id);
    if (at === -1) return;
    this.canvasNodes.splice(at, 1);
    for (let i = this.canvasEdges.length - 1; i >= 0; i--) {
      const edge = this.canvasEdges[i]!;
      if (edge.source === id || edge.target === id) {
        this.canvasEdges.splice(i, 1);
      }
    }
    for (const [key, controller] of [...this.pending.entries()]) {
      const [source, target] = JSON.parse(key) as [string, string];
      if (source === id || target === id) {
        this.pending.delete(key);
        controller.abort();
      }
    }
  }

  moveNode(id: string, position: Position): void {
    const found = this.node(id);
    if (found) found.position = position;
  }

  selectNode(id: string): void {
    for (const n of this.canvasNodes) n.selected = n.node.id === id;
  }

  clearSelection(): void {
    for (const n of this.canvasNodes) n.selected = false;
  }

  hasEdge(source: string, target: string): boolean {
    return this.canvasEdges.some((e) => e.source === source && e.target === target);
  }

  /** True when `to` is reachable from `from` along drawn edges. */
  hasPath(from: string, to: string): boolean {
    const queue = [from];
    const seen = new Set<string>();
    while (queue.length) {
      const at = queue.shift()!;
      if (at === to) return true;
      if (seen.has(at)) continue;
      seen.add(at);
      for (const e of this.canvasEdges) {
        if (e.source === at) queue.push(e.target);
      }
    }
    return false;
  }

  /**
   * The connect gesture: ask the gateway whether the edge may exist, and draw
   * it only on a valid verdict. Verdicts are cached per endpoint-pair so a
   * repeated gesture costs no round trip; the cycle verdict also depends on
   * whether the target already reaches the source, so that bit is part of the
   * cache key.
   */
  async attemptConnect(source: string, target: string): Promise<ConnectOutcome> {
    const sourceNode = this.node(source);
    const targetNode = this.node(target);
    if (!sourceNode || !targetNode) {
      throw new Error(`connect ${source}→${target}: both nodes must be on the canvas`);
    }

    const cacheKey = canonicalJson({
      source: gestureIdentity(sourceNode.node),
      target: gestureIdentity(targetNode.node),
      backpath: source === target || this.hasPath(target, source),
    });
    const cached = this.verdictCache.get(cacheKey);
    if (cached) {
      return this.applyVerdict(source, target, cached);
    }

    const gestureKey = canonicalJson([source, target]);
    this.pending.get(gestureKey)?.abort();
    const controller = new AbortController();
    this.pending.set(gestureKey, controller);

    let gatewaySays: GatewayVerdict;
    try {
      gatewaySays = await this.client.validateEdge(
        this.serialize(),
        source,
        target,
        controller.signal,
      );
    } catch (err) {
      if (this.pending.get(gestureKey) === controller) this.pending.delete(gestureKey);
      if (err instanceof Error && err.name === "AbortError") {
        return { kind: "cancelled" };
      }
      if (err instanceof OfflineError) {
        return { kind: "offline", retry: () => this.attemptConnect(source, target) };
      }
      throw err;
    }

    const verdict: EdgeVerdict = {
      source,
      target,
      valid: gatewaySays.valid,
      failed_rules: gatewaySays.failed_rules,
      fetched_at: new Date().toISOString(),
    };
    this.verdictCache.set(cacheKey, verdict);
    this.verdictLog.push(verdict);

    // The gesture may have been undone while the request was in flight.
    if (this.pending.get(gestureKey) !== controller) {
      return { kind: "cancelled" };
    }
    this.pending.delete(gestureKey);
    return this.applyVerdict(source, target, verdict);
  }

  /** Undo an in-flight connect gesture; its eventual verdict draws nothing. */
  cancelConnect(source: string, target: string): void {
    const gestureKey = canonicalJson([source, target]);
    const controller = this.pending.get(gestureKey);
    if (controller) {
      this.pending.delete(gestureKey);
      controller.abort();
    }
  }

  /** Strips position/selected; node order is insertion order. */
  serialize(): PipelineDoc {
    return {
      id: this.id,
      name: this.name,
      nodes: this.canvasNodes.map((n) => ({
        ...n.node,
        properties: { ...n.node.properties },
      })),
      edges: this.canvasEdges.map((e) => ({ ...e })),
    };
  }

  /** UI-local layout document, kept out of the pipeline schema. */
  positionsSidecar(pipelineId: string): PositionsSidecar {
    const positions: Record<string, Position> = {};
    for (const n of this.canvasNodes) {
      positions[n.node.id] = { ...n.position };
    }
    return { pipeline_id: pipelineId, positions };
  }

  private applyVerdict(
    source: string,
    target: string,
    verdict: EdgeVerdict,
  ): ConnectOutcome {
    if (!verdict.valid) {
      return { kind: "rejected", verdict };
    }
    if (!this.hasEdge(source, target)) {
      this.canvasEdges.push({ source, target });
    }
    return { kind: "connected", verdict };
  }

  private defaultPosition(ordinal: number): Position {
    return { x: 60 + 180 * ordinal, y: 80 + 48 * (ordinal % 3) };
  }
}

/** What a verdict can depend on: the endpoints' kind/properties/model. */
function gestureIdentity(node: NodeDoc): unknown {
  return { kind: node.kind, properties: node.properties, model_ref: node.model_ref };
}
