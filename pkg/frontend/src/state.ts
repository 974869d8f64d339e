// Session state: the server is the single source of truth, this is a cache of
// the last acknowledged responses plus pending canvas-only extras.

import type { ApiClient } from "./api.js";
import type { BlueprintDoc, LayoutKind, Override, Ranking, StoryFrame } from "./types.js";

export interface Annotation {
  kind: "line" | "rect" | "text";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  text?: string;
  color: string;
}

export class Session {
  projectId: string | null = null;
  revision = 0;
  storyframe: StoryFrame | null = null;
  ranking: Ranking | null = null;
  blueprint: BlueprintDoc | null = null;
  layout: LayoutKind | null = null;
  overrides: Override[] = [];
  svg: string | null = null;
  // Freeform drawings are presentation-only; they are baked into exports,
  // never into domain state.
  annotations: Annotation[] = [];

  constructor(readonly api: ApiClient) {}

  require(): asserts this is Session & { projectId: string; storyframe: StoryFrame } {
    if (this.projectId === null || this.storyframe === null) {
      throw new Error("no project loaded yet");
    }
  }

  async create(sourceText: string, goal: string, seed?: number): Promise<void> {
    const created = await this.api.createProject(sourceText, goal, seed);
    this.projectId = created.id;
    this.revision = created.revision;
    this.storyframe = created.storyframe;
    this.ranking = null;
    this.blueprint = null;
    this.layout = null;
    this.overrides = [];
    this.svg = null;
    this.annotations = [];
  }

  /** Re-read the frame from the server (the view re-renders from this). */
  async reload(): Promise<void> {
    this.require();
    const got = await this.api.getStoryframe(this.projectId!);
    this.revision = got.revision;
    this.storyframe = got.storyframe;
  }

  /** Push an edited frame; on a stale revision the caller reloads. */
  async saveFrame(frame: StoryFrame): Promise<void> {
    this.require();
    const saved = await this.api.putStoryframe(this.projectId!, this.revision, frame);
    this.revision = saved.revision;
    this.storyframe = saved.storyframe;
  }

  async refreshStylization(seed: number): Promise<void> {
    this.require();
    const got = await this.api.refreshStylization(this.projectId!, seed);
    this.revision = got.revision;
    await this.reload();
  }

  async fetchRanking(): Promise<Ranking> {
    this.require();
    const got = await this.api.getLayouts(this.projectId!);
    this.ranking = got.ranking;
    return got.ranking;
  }

  async selectLayout(layout: LayoutKind): Promise<void> {
    this.require();
    const built = await this.api.buildBlueprint(this.projectId!, layout, this.overrides);
    this.revision = built.revision;
    this.blueprint = built.blueprint;
    this.layout = layout;
    this.svg = await this.api.renderSvg(this.projectId!);
  }

  /** Persist the override set against the current layout and re-render. */
  async pushOverrides(): Promise<void> {
    this.require();
    if (this.layout === null) {
      throw new Error("select a layout before editing the canvas");
    }
    const built = await this.api.buildBlueprint(this.projectId!, this.layout, this.overrides);
    this.revision = built.revision;
    this.blueprint = built.blueprint;
    this.svg = await this.api.renderSvg(this.projectId!);
  }

  /** Server SVG with local annotations baked in, ready to download. */
  exportSvg(): string {
    if (this.svg === null) {
      throw new Error("nothing rendered yet");
    }
    if (this.annotations.length === 0) {
      return this.svg;
    }
    const shapes = this.annotations
      .map((a) => {
        if (a.kind === "line") {
          return `<line x1="${a.x1}" y1="${a.y1}" x2="${a.x2}" y2="${a.y2}" stroke="${a.color}" stroke-width="2"/>`;
        }
        if (a.kind === "rect") {
          const x = Math.min(a.x1, a.x2);
          const y = Math.min(a.y1, a.y2);
          const w = Math.abs(a.x2 - a.x1);
          const h = Math.abs(a.y2 - a.y1);
          return `<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="none" stroke="${a.color}" stroke-width="2"/>`;
        }
        const text = (a.text ?? "").replace(/&/g, "&amp;").replace(/</g, "&lt;");
        return `<text x="${a.x1}" y="${a.y1}" fill="${a.color}" font-size="16">${text}</text>`;
      })
      .join("");
    const group = `<g class="annotations">${shapes}</g>`;
    return this.svg.replace("</svg>", `${group}</svg>`);
  }
}
