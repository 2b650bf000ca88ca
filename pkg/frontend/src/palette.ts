// Model palette: the draggable catalog of hub entries, grouped by task.
import { GatewayClient, OfflineError, type ModelFilter } from "./client.js";
import type { ModelDoc } from "./types.js";

export interface PaletteItem {
  id: string;
  name: string;
  version: string;
  task: ModelDoc["task"];
  /** "en→hi" for translation entries, plain language tags otherwise. */
  languages: string[];
}

export interface PaletteGroup {
  task: ModelDoc["task"];
  items: PaletteItem[];
}

export function languageLabels(model: ModelDoc): string[] {
  return model.supported_pairs.map((pair) =>
    Array.isArray(pair) ? `${pair[0]}→${pair[1]}` : pair,
  );
}

export function paletteItem(model: ModelDoc): PaletteItem {
  return {
    id: model.id,
    name: model.name,
    version: model.version,
    task: model.task,
    languages: languageLabels(model),
  };
}

/** Groups sorted by task, items by name then version. */
export function groupByTask(models: ModelDoc[]): PaletteGroup[] {
  const byTask = new Map<ModelDoc["task"], PaletteItem[]>();
  for (const model of models) {
    const items = byTask.get(model.task) ?? [];
    items.push(paletteItem(model));
    byTask.set(model.task, items);
  }
  return [...byTask.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([task, items]) => ({
      task,
      items: items.sort(
        (a, b) => a.name.localeCompare(b.name) || a.version.localeCompare(b.version),
      ),
    }));
}

/** Case-insensitive substring match on task, name, or a language label. */
export function filterModels(models: ModelDoc[], query: string): ModelDoc[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return models;
  return models.filter(
    (m) =>
      m.task.includes(needle) ||
      m.name.toLowerCase().includes(needle) ||
      languageLabels(m).some((l) => l.toLowerCase().includes(needle)),
  );
}

export type PaletteView =
  | {
      offline: false;
      models: ModelDoc[];
      groups: PaletteGroup[];
      itemCount: number;
      /** True when the hub has no entries — render the empty-state message. */
      empty: boolean;
    }
  | { offline: true; retry: () => Promise<PaletteView> };

export async function loadPalette(
  client: GatewayClient,
  filter: ModelFilter = {},
): Promise<PaletteView> {
  let models: ModelDoc[];
  try {
    models = await client.listModels(filter);
  } catch (err) {
    if (err instanceof OfflineError) {
      return { offline: true, retry: () => loadPalette(client, filter) };
    }
    throw err;
  }
  return {
    offline: false,
    models,
    groups: groupByTask(models),
    itemCount: models.length,
    empty: models.length === 0,
  };
}
