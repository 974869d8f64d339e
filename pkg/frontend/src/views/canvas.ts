// Canvas view: the rendered infographic with direct manipulation. Drags write
// positional overrides (persisted through the blueprint endpoint), inline
// text edits round-trip through the storyframe, and freeform line/rect/text
// annotations stay presentation-only until export bakes them in.

import { el, type ViewContext } from "../context.js";
import { applyDrag } from "../overrides.js";
import type { StoryFrame } from "../types.js";

type Tool = "select" | "line" | "rect" | "text";

interface DragState {
  targetId: string;
  startX: number;
  startY: number;
  lastX: number;
  lastY: number;
}

export function mountCanvasView(container: HTMLElement, ctx: ViewContext): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const session = ctx.session;
  if (!session.storyframe || session.svg === null) {
    container.append(el(doc, "p", { class: "empty" }, "Select a layout first."));
    return;
  }

  const root = el(doc, "div", { class: "canvas-view" });
  const toolbar = el(doc, "div", { class: "toolbar" });
  let tool: Tool = "select";
  for (const name of ["select", "line", "rect", "text"] as Tool[]) {
    const button = el(doc, "button", { class: `tool tool-${name}`, type: "button" }, name);
    button.addEventListener("click", () => {
      tool = name;
      toolbar.querySelectorAll(".tool").forEach((b) => b.classList.remove("active"));
      button.classList.add("active");
    });
    toolbar.append(button);
  }

  const exportButton = el(doc, "button", { class: "export-svg", type: "button" }, "Export SVG");
  exportButton.addEventListener("click", () => {
    const blobText = session.exportSvg();
    const anchor = el(doc, "a", {
      href: `data:image/svg+xml;charset=utf-8,${encodeURIComponent(blobText)}`,
      download: "infographic.svg",
    });
    doc.body.append(anchor);
    anchor.click();
    anchor.remove();
  });
  toolbar.append(exportButton);

  const stage = el(doc, "div", { class: "stage" });
  stage.innerHTML = session.svg;
  const editor = el(doc, "div", { class: "inline-editor" });
  root.append(toolbar, stage, editor);
  container.append(root);

  const refresh = () => mountCanvasView(container, ctx);

  // The stage shows the SVG at natural size, so client pixel deltas are
  // canvas pixel deltas.
  let drag: DragState | null = null;
  let annotationStart: { x: number; y: number } | null = null;

  const groupIdAt = (eventTarget: EventTarget | null): string | null => {
    let node = eventTarget as Element | null;
    while (node && node !== stage) {
      if (node.tagName === "g") {
        const id = node.getAttribute("id");
        if (id && id.startsWith("sf-") && node.getAttribute("class") === "su") {
          return id;
        }
      }
      node = node.parentElement;
    }
    return null;
  };

  stage.addEventListener("mousedown", (event) => {
    const mouse = event as MouseEvent;
    if (tool === "select") {
      const id = groupIdAt(mouse.target);
      if (id) {
        drag = { targetId: id, startX: mouse.clientX, startY: mouse.clientY, lastX: mouse.clientX, lastY: mouse.clientY };
      }
    } else {
      annotationStart = { x: mouse.clientX, y: mouse.clientY };
    }
  });

  stage.addEventListener("mousemove", (event) => {
    const mouse = event as MouseEvent;
    if (drag) {
      drag.lastX = mouse.clientX;
      drag.lastY = mouse.clientY;
    }
  });

  stage.addEventListener("mouseup", (event) => {
    const mouse = event as MouseEvent;
    if (drag) {
      const dx = drag.lastX - drag.startX;
      const dy = drag.lastY - drag.startY;
      const id = drag.targetId;
      drag = null;
      if (dx !== 0 || dy !== 0) {
        session.overrides = applyDrag(session.overrides, id, dx, dy);
        ctx.busy(session.pushOverrides().then(refresh));
      }
      return;
    }
    if (annotationStart && tool !== "select") {
      const color = session.storyframe?.stylization.theme_colors[0] ?? "#333333";
      if (tool === "text") {
        session.annotations.push({
          kind: "text",
          x1: annotationStart.x,
          y1: annotationStart.y,
          x2: annotationStart.x,
          y2: annotationStart.y,
          text: "note",
          color,
        });
      } else {
        session.annotations.push({
          kind: tool,
          x1: annotationStart.x,
          y1: annotationStart.y,
          x2: mouse.clientX,
          y2: mouse.clientY,
          color,
        });
      }
      annotationStart = null;
    }
  });

  // Double-click a unit to edit its text inline; the edit saves through the
  // storyframe endpoint and the canvas re-renders from the server.
  stage.addEventListener("dblclick", (event) => {
    const id = groupIdAt((event as MouseEvent).target);
    if (!id || !session.storyframe) {
      return;
    }
    const unitId = id.slice(3); // strip the sf- namespace
    const frame = JSON.parse(JSON.stringify(session.storyframe)) as StoryFrame;
    let found: { pieceIndex: number; unitIndex: number } | null = null;
    frame.pieces.forEach((piece, pieceIndex) =>
      piece.units.forEach((unit, unitIndex) => {
        if (unit.id === unitId) {
          found = { pieceIndex, unitIndex };
        }
      }),
    );
    if (!found) {
      return;
    }
    const { pieceIndex, unitIndex } = found;
    editor.replaceChildren();
    const textArea = el(doc, "textarea", { class: "edit-unit-text", rows: "3" });
    textArea.value = frame.pieces[pieceIndex].units[unitIndex].text;
    const saveButton = el(doc, "button", { class: "save-unit-text", type: "button" }, "Save text");
    saveButton.addEventListener("click", () => {
      const unit = frame.pieces[pieceIndex].units[unitIndex];
      unit.text = textArea.value;
      unit.primary_highlight = null;
      unit.secondary_highlights = [];
      ctx.busy(
        session
          .saveFrame(frame)
          .then(() => session.pushOverrides())
          .then(refresh),
      );
    });
    editor.append(textArea, saveButton);
  });
}
