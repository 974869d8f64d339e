// Thin typed client over the project service. Every mutation returns the new
// revision; callers feed it back on the next write (optimistic concurrency).

import type { BlueprintDoc, LayoutKind, Override, Ranking, StoryFrame } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly revision?: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "unknown";
  let message = `${response.status}`;
  let revision: number | undefined;
  try {
    const body = await response.json();
    code = body?.error?.code ?? code;
    message = body?.error?.message ?? message;
    revision = body?.error?.revision;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, code, message, revision);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  createProject(sourceText: string, goal: string, seed?: number) {
    return this.request<{ id: string; revision: number; storyframe: StoryFrame }>("POST", "/projects", {
      source_text: sourceText,
      goal,
      ...(seed === undefined ? {} : { seed }),
    });
  }

  getStoryframe(projectId: string) {
    return this.request<{ revision: number; storyframe: StoryFrame }>(
      "GET",
      `/projects/${projectId}/storyframe`,
    );
  }

  putStoryframe(projectId: string, revision: number, storyframe: StoryFrame) {
    return this.request<{ revision: number; storyframe: StoryFrame }>(
      "PUT",
      `/projects/${projectId}/storyframe`,
      { revision, storyframe },
    );
  }

  refreshStylization(projectId: string, seed: number) {
    return this.request<{ revision: number; stylization: StoryFrame["stylization"] }>(
      "POST",
      `/projects/${projectId}/stylization:refresh`,
      { seed },
    );
  }

  getLayouts(projectId: string) {
    return this.request<{ revision: number; ranking: Ranking }>("GET", `/projects/${projectId}/layouts`);
  }

  buildBlueprint(projectId: string, layout: LayoutKind, overrides: Override[]) {
    return this.request<{ revision: number; blueprint: BlueprintDoc }>(
      "POST",
      `/projects/${projectId}/blueprint`,
      { layout, overrides },
    );
  }

  async renderSvg(projectId: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/projects/${projectId}/render.svg`);
    if (!response.ok) {
      await parseError(response);
    }
    return await response.text();
  }
}
