// Plumbing shared by the views: the session, async-work tracking (so tests
// and the shell can await quiescence), error surfacing, and navigation.

import type { Session } from "./state.js";
import { ApiError } from "./api.js";

export type ViewName = "input" | "story" | "stylization" | "layout" | "canvas";

export class ViewContext {
  private tail: Promise<void> = Promise.resolve();
  lastError: string | null = null;
  staleConflict = false;

  constructor(
    readonly session: Session,
    readonly navigate: (view: ViewName) => void,
    readonly statusEl?: HTMLElement,
  ) {}

  /** Chain background work; failures surface in the status line. */
  busy(work: Promise<unknown>): void {
    this.tail = this.tail
      .then(() => work)
      .then(
        () => {
          this.lastError = null;
          this.staleConflict = false;
          this.setStatus("");
        },
        (error) => {
          if (error instanceof ApiError && error.code === "stale_revision") {
            // Someone else moved the project on: prompt a reload.
            this.staleConflict = true;
            this.setStatus("Project changed elsewhere - reload to continue.");
          } else {
            this.setStatus(String(error?.message ?? error));
          }
          this.lastError = String(error?.message ?? error);
        },
      );
  }

  /** Resolves when every queued mutation has settled. */
  idle(): Promise<void> {
    return this.tail;
  }

  private setStatus(text: string): void {
    if (this.statusEl) {
      this.statusEl.textContent = text;
    }
  }
}

export function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}
