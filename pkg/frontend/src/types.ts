// Wire types mirroring the service's canonical JSON documents.

export interface TextSpan {
  start: number;
  end: number;
}

export type ChartKind = "pie" | "bar" | "line" | "single_pie" | "pictograph";

export interface ChartSpec {
  kind: ChartKind;
  series: { label: string; value: number }[];
  fraction: [number, number] | null;
  single_value: number | null;
}

export interface StoryUnit {
  id: string;
  text: string;
  insight: string;
  primary_highlight: TextSpan | null;
  secondary_highlights: TextSpan[];
  icon_keyword: string | null;
  chart: ChartSpec | null;
}

export interface StoryPiece {
  id: string;
  subtitle: string;
  content: string;
  relation_to_goal: string;
  units: StoryUnit[];
}

export interface PieceRelation {
  from_id: string;
  to_id: string;
  kind: string;
}

export interface Stylization {
  theme_colors: string[];
  background: string;
  fonts: Record<"title" | "subtitle" | "highlight" | "regular", string>;
  text_colors: Record<"primary_highlight" | "secondary_highlight" | "regular", string>;
}

export interface StoryFrame {
  schema_version: string;
  goal: string;
  title: string;
  pieces: StoryPiece[];
  relations: PieceRelation[];
  stylization: Stylization;
}

export type LayoutKind = "grid" | "spiral" | "landscape" | "star" | "portrait" | "portrait_grid";

export const LAYOUT_KINDS: LayoutKind[] = ["grid", "spiral", "landscape", "star", "portrait", "portrait_grid"];

export interface Ranking {
  schema_version: string;
  scores: Record<LayoutKind, number>;
  order: LayoutKind[];
  firings: { rule_id: string; layout: LayoutKind }[];
}

export interface Override {
  id: string;
  dx: number;
  dy: number;
  sx: number;
  sy: number;
}

export interface BlueprintDoc {
  schema_version: string;
  layout: LayoutKind;
  canvas: { width: number; height: number };
  x: number;
  overrides: Override[];
  warnings: string[];
  [key: string]: unknown;
}

export interface ServiceError {
  code: string;
  message: string;
  violations?: { path: string; rule: string; message: string }[];
  revision?: number;
}
