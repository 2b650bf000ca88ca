export {
  GatewayClient,
  GatewayError,
  OfflineError,
  type FetchLike,
  type ModelFilter,
} from "./client.js";
export {
  DesignerCanvas,
  type CanvasNode,
  type ConnectOutcome,
  type EdgeVerdict,
  type NodeInit,
  type Position,
  type PositionsSidecar,
} from "./canvas.js";
export {
  filterModels,
  groupByTask,
  languageLabels,
  loadPalette,
  paletteItem,
  type PaletteGroup,
  type PaletteItem,
  type PaletteView,
} from "./palette.js";
export { traceBars, violationMarkers, type TimingBar, type ViolationMarkers } from "./results.js";
export { canonicalJson } from "./json.js";
export type {
  EdgeDoc,
  ErrorBody,
  GatewayVerdict,
  ModelDoc,
  ModelRegistration,
  NodeDoc,
  NodeKind,
  PayloadDoc,
  PayloadKind,
  PipelineDoc,
  PipelineSummary,
  RunResult,
  SavedPipelineDoc,
  Task,
  TraceDoc,
  ValidationReportDoc,
} from "./types.js";
