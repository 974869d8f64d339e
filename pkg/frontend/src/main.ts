// Shell: tab navigation over the five views, one shared session.

import { ApiClient } from "./api.js";
import { ViewContext, type ViewName, el } from "./context.js";
import { Session } from "./state.js";
import { mountCanvasView } from "./views/canvas.js";
import { mountInputView } from "./views/input.js";
import { mountLayoutView } from "./views/layout.js";
import { mountStoryView } from "./views/story.js";
import { mountStylizationView } from "./views/stylization.js";

const VIEWS: Record<ViewName, (container: HTMLElement, ctx: ViewContext) => void> = {
  input: mountInputView,
  story: mountStoryView,
  stylization: mountStylizationView,
  layout: mountLayoutView,
  canvas: mountCanvasView,
};

export interface App {
  ctx: ViewContext;
  session: Session;
  show: (view: ViewName) => void;
  current: () => ViewName;
}

export function createApp(root: HTMLElement, baseUrl: string): App {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const nav = el(doc, "nav", { class: "tabs" });
  const status = el(doc, "div", { class: "status", role: "status" });
  const viewport = el(doc, "main", { class: "viewport" });
  root.append(nav, status, viewport);

  const session = new Session(new ApiClient(baseUrl));
  let active: ViewName = "input";

  const show = (view: ViewName) => {
    active = view;
    nav.querySelectorAll(".tab").forEach((tab) => {
      tab.classList.toggle("active", tab.getAttribute("data-view") === view);
    });
    VIEWS[view](viewport, ctx);
  };

  const ctx = new ViewContext(session, show, status);

  (Object.keys(VIEWS) as ViewName[]).forEach((view) => {
    const tab = el(doc, "button", { class: "tab", type: "button", "data-view": view }, view);
    tab.addEventListener("click", () => show(view));
    nav.append(tab);
  });

  show("input");
  return { ctx, session, show, current: () => active };
}

declare global {
  interface Window {
    infoweaveApp?: App;
  }
}

// Browser entry point; tests call createApp directly instead.
if (typeof document !== "undefined" && document.getElementById("app") && !("__vitest__" in globalThis)) {
  const rootEl = document.getElementById("app") as HTMLElement;
  const base = rootEl.dataset.apiBase ?? "http://127.0.0.1:8040";
  window.infoweaveApp = createApp(rootEl, base);
}
