import { describe, expect, it } from "vitest";

import { GatewayClient, type FetchLike } from "../src/client.js";
import {
  filterModels,
  groupByTask,
  languageLabels,
  loadPalette,
} from "../src/palette.js";
import type { ModelDoc } from "../src/types.js";
import { loadRecording, replayTransport } from "./replay.js";

function modelDoc(over: Partial<ModelDoc> & Pick<ModelDoc, "id" | "name" | "task">): ModelDoc {
  return {
    version: "1.0",
    supported_pairs: [],
    backend: "rest",
    endpoint: "http://models.local/x",
    request_template: { method: "POST", path: "/infer", payload_field: "data", response_field: "data" },
    input_kind: "text",
    output_kind: "text",
    ...over,
  };
}

const translatorA = modelDoc({ id: "a", name: "alpha-mt", task: "mt", supported_pairs: [["en", "hi"]] });
const translatorB = modelDoc({ id: "b", name: "reverse-mt", task: "mt", supported_pairs: [["hi", "en"]] });
const recognizer = modelDoc({
  id: "c",
  name: "gamma-asr",
  task: "asr",
  supported_pairs: ["en", "ta"],
  input_kind: "audio",
});

describe("grouping", () => {
  it("two translators and a recognizer make two groups, three items", () => {
    const groups = groupByTask([translatorA, translatorB, recognizer]);
    expect(groups.map((g) => g.task)).toEqual(["asr", "mt"]);
    expect(groups.reduce((n, g) => n + g.items.length, 0)).toBe(3);
  });

  it("items inside a group are sorted by name", () => {
    const groups = groupByTask([translatorB, translatorA]);
    expect(groups[0]!.items.map((i) => i.name)).toEqual(["alpha-mt", "reverse-mt"]);
  });

  it("translation entries show ordered pairs, others plain tags", () => {
    expect(languageLabels(translatorA)).toEqual(["en→hi"]);
    expect(languageLabels(recognizer)).toEqual(["en", "ta"]);
  });
});

describe("filtering", () => {
  const all = [translatorA, translatorB, recognizer];

  it("query 'mt' keeps only translation items", () => {
    const kept = filterModels(all, "mt");
    expect(kept.map((m) => m.task)).toEqual(["mt", "mt"]);
  });

  it("matches language labels and is case-insensitive", () => {
    expect(filterModels(all, "TA").map((m) => m.id)).toEqual(["c"]);
    expect(filterModels(all, "en→hi").map((m) => m.id)).toEqual(["a"]);
  });

  it("blank query keeps everything", () => {
    expect(filterModels(all, "  ")).toEqual(all);
  });
});

describe("loading from the gateway", () => {
  it("an empty hub renders the empty state", async () => {
    const transport = replayTransport(loadRecording("empty-hub"));
    const client = new GatewayClient("http://replay", transport.fetchImpl);
    const view = await loadPalette(client);
    expect(view.offline).toBe(false);
    if (view.offline) return;
    expect(view.empty).toBe(true);
    expect(view.groups).toEqual([]);
  });

  it("a seeded hub groups by task", async () => {
    const transport = replayTransport(loadRecording("designer-session"));
    const client = new GatewayClient("http://replay", transport.fetchImpl);
    const view = await loadPalette(client);
    if (view.offline) throw new Error("unexpected offline");
    expect(view.itemCount).toBe(4);
    expect(view.groups.map((g) => g.task)).toEqual(["asr", "mt", "tts"]);
  });

  it("a task filter is passed through to the service", async () => {
    const transport = replayTransport(loadRecording("canvas-gestures"));
    const client = new GatewayClient("http://replay", transport.fetchImpl);
    const translators = await loadPalette(client, { task: "mt" });
    if (translators.offline) throw new Error("unexpected offline");
    expect(translators.itemCount).toBe(2);
    const recognizers = await loadPalette(client, { task: "asr" });
    if (recognizers.offline) throw new Error("unexpected offline");
    expect(recognizers.empty).toBe(true);
  });

  it("network failure shows the offline banner; retry recovers", async () => {
    const replay = replayTransport(loadRecording("empty-hub"));
    let failures = 1;
    const flaky: FetchLike = (url, init) => {
      if (failures > 0) {
        failures -= 1;
        return Promise.reject(new TypeError("fetch failed"));
      }
      return replay.fetchImpl(url, init);
    };
    const client = new GatewayClient("http://replay", flaky);
    const view = await loadPalette(client);
    expect(view.offline).toBe(true);
    if (!view.offline) return;
    const recovered = await view.retry();
    expect(recovered.offline).toBe(false);
  });
});
