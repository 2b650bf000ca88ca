// The scripted designer session, end to end: load the palette, build an
// audio→recognize→translate chain with live per-gesture validation, watch an
// invalid gesture bounce, save, find it in the catalog, and run it.
//
// By default this replays recorded gateway exchanges. Point INFERPIPE_GATEWAY
// at a running gateway (and INFERPIPE_MOCKS at a mock model server) to run
// the same script against the real service.
import { Buffer } from "node:buffer";
import { describe, expect, it } from "vitest";

import { DesignerCanvas } from "../src/canvas.js";
import { GatewayClient } from "../src/client.js";
import { canonicalJson } from "../src/json.js";
import { loadPalette } from "../src/palette.js";
import { traceBars } from "../src/results.js";
import type { PayloadDoc, Task } from "../src/types.js";
import { loadRecording, replayTransport } from "./replay.js";

const LIVE_GATEWAY = process.env.INFERPIPE_GATEWAY;

interface Session {
  client: GatewayClient;
  mockBase: string;
  version: string;
  live: boolean;
}

function startSession(): Session {
  if (LIVE_GATEWAY) {
    const mocks = process.env.INFERPIPE_MOCKS;
    if (!mocks) {
      throw new Error("INFERPIPE_GATEWAY is set; INFERPIPE_MOCKS must point at a mock model server");
    }
    return {
      client: new GatewayClient(LIVE_GATEWAY),
      mockBase: mocks.replace(/\/+$/, ""),
      version: `1.0-${Date.now()}`,
      live: true,
    };
  }
  const recording = loadRecording("designer-session");
  const transport = replayTransport(recording);
  return {
    client: new GatewayClient("http://replay", transport.fetchImpl),
    mockBase: recording.context["mock_base"]!,
    version: "1.0-rec",
    live: false,
  };
}

describe("designer session", () => {
  it("palette, gestures, save, catalog, run", async () => {
    const session = startSession();
    const { client, mockBase, version, live } = session;

    const register = (name: string, task: Task, pairs: [string, string][] | string[], path: string) =>
      client.registerModel({
        name,
        version,
        task,
        supported_pairs: pairs,
        endpoint: `${mockBase}${path}`,
      });

    const mt = await register("bridge-mt", "mt", [["en", "hi"]], "/mt/en-hi");
    await register("bridge-mt-back", "mt", [["hi", "en"]], "/mt/hi-en");
    const asr = await register("stream-asr", "asr", ["en"], "/asr/en");
    const tts = await register("voice-tts", "tts", ["hi"], "/tts/hi");

    // palette
    const palette = await loadPalette(client);
    if (palette.offline) throw new Error("gateway offline");
    expect(palette.empty).toBe(false);
    const tasks = palette.groups.map((g) => g.task);
    for (const task of ["asr", "mt", "tts"]) expect(tasks).toContain(task);
    if (!live) {
      expect(palette.itemCount).toBe(4);
      expect(tasks).toEqual(["asr", "mt", "tts"]);
    }

    // canvas gestures
    const canvas = new DesignerCanvas(client, { id: "canvas-session", name: "voice-translation" });
    canvas.addNode({
      id: "in",
      kind: "input",
      properties: { data_kind: "audio", source: "upload", lang: "en" },
    });
    canvas.addNode({ id: "asr1", kind: "asr", properties: { lang: "en" }, model_ref: asr.id });
    expect((await canvas.attemptConnect("in", "asr1")).kind).toBe("connected");

    canvas.addNode({
      id: "mt1",
      kind: "mt",
      properties: { source_lang: "en", target_lang: "hi" },
      model_ref: mt.id,
    });
    const drawn = await canvas.attemptConnect("asr1", "mt1");
    expect(drawn.kind).toBe("connected");
    expect(canvas.hasEdge("asr1", "mt1")).toBe(true);

    const badTts = canvas.addNode({
      id: "tts1",
      kind: "tts",
      properties: { lang: "hi" },
      model_ref: tts.id,
    });
    const refused = await canvas.attemptConnect("tts1", "mt1");
    expect(refused.kind).toBe("rejected");
    if (refused.kind === "rejected") {
      expect(refused.verdict.failed_rules).toContain("kind-compatibility");
    }
    expect(canvas.hasEdge("tts1", "mt1")).toBe(false);
    expect(canvas.edges()).toHaveLength(2);

    canvas.removeNode(badTts.node.id);
    canvas.addNode({ id: "out", kind: "output" });
    expect((await canvas.attemptConnect("mt1", "out")).kind).toBe("connected");

    // every drawn edge has a matching valid verdict from this session
    for (const edge of canvas.edges()) {
      const approved = canvas.verdictLog.some(
        (v) => v.source === edge.source && v.target === edge.target && v.valid,
      );
      expect(approved).toBe(true);
    }

    // save, then find it in the catalog
    const doc = canvas.serialize();
    const saved = await client.savePipeline(doc, "voice translation demo");
    expect(saved.endpoint_id).toMatch(/^[a-z0-9]{12}$/);

    const zoo = await client.listPipelines();
    const entry = zoo.find((p) => p.endpoint_id === saved.endpoint_id);
    expect(entry?.name).toBe("voice-translation");
    expect(entry?.node_count).toBe(4);

    // the saved document re-imports into an identical canvas
    const catalogued = await client.getPipeline(saved.endpoint_id);
    expect(canonicalJson(catalogued.pipeline)).toBe(canonicalJson(doc));
    const reopened = DesignerCanvas.fromPipeline(client, catalogued.pipeline);
    expect(canonicalJson(reopened.serialize())).toBe(canonicalJson(doc));

    // test run without saving: pre-synthesized audio comes back translated
    const input: PayloadDoc = {
      kind: "audio",
      data: Buffer.from("TTSAUDIO:hello", "utf-8").toString("base64"),
      format: "wav",
      metadata: {},
    };
    const run = await client.execute(doc, input);
    expect(run.output.kind).toBe("text");
    expect(run.output.data).toBe("MT(en->hi): hello");
    expect(run.trace.overhead_ms).toBeGreaterThan(0);
    expect(run.trace.total_ms - run.trace.model_ms).toBe(run.trace.overhead_ms);

    const bars = traceBars(run.trace);
    expect(bars.map((b) => b.node_id)).toEqual(["in", "asr1", "mt1", "out"]);

    // and through the generated endpoint
    const rerun = await client.runSaved(saved.endpoint_id, input);
    expect(rerun.output.data).toBe("MT(en->hi): hello");
  });
});
