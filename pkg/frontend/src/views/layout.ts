// Layout view: ranked cards with schematic thumbnails; selecting one builds
// the blueprint server-side and previews the real render.

import { el, type ViewContext } from "../context.js";
import { LAYOUT_KINDS, type LayoutKind } from "../types.js";

/** Abstract cell diagram for a layout family at a given piece count. */
export function schematicCells(layout: LayoutKind, n: number): { x: number; y: number; w: number; h: number }[] {
  const cells: { x: number; y: number; w: number; h: number }[] = [];
  const cols = n <= 6 ? 2 : 3;
  const rows = (counts: number[]) => {
    const rowH = 1 / counts.length;
    counts.forEach((count, r) => {
      for (let c = 0; c < count; c += 1) {
        cells.push({ x: c / count, y: r * rowH, w: 1 / count, h: rowH });
      }
    });
  };
  if (layout === "portrait") {
    rows(Array.from({ length: n }, () => 1));
  } else if (layout === "landscape") {
    for (let c = 0; c < n; c += 1) {
      cells.push({ x: c / n, y: 0, w: 1 / n, h: 1 });
    }
  } else if (layout === "grid" || layout === "spiral") {
    const counts: number[] = [];
    for (let left = n; left > 0; left -= cols) {
      counts.push(Math.min(cols, left));
    }
    rows(counts);
  } else if (layout === "portrait_grid") {
    const middle = n >= 4 ? n - 2 : n - 1;
    const counts: number[] = n === 1 ? [1] : [1];
    for (let left = middle; left > 0; left -= cols) {
      counts.push(Math.min(cols, left));
    }
    if (n >= 4) {
      counts.push(1);
    }
    rows(counts);
  } else {
    // star: ring of cells around a center block
    const ring = Math.max(n, 1);
    for (let i = 0; i < ring; i += 1) {
      const angle = -Math.PI / 2 + (2 * Math.PI * i) / ring;
      cells.push({ x: 0.5 + 0.38 * Math.cos(angle) - 0.1, y: 0.5 + 0.38 * Math.sin(angle) - 0.1, w: 0.2, h: 0.2 });
    }
    cells.push({ x: 0.35, y: 0.35, w: 0.3, h: 0.3 });
  }
  return cells;
}

function thumbnail(doc: Document, layout: LayoutKind, n: number): SVGElement {
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", "0 0 100 100");
  svg.setAttribute("class", "layout-thumb");
  for (const cell of schematicCells(layout, n)) {
    const rect = doc.createElementNS("http://www.w3.org/2000/svg", "rect");
    rect.setAttribute("x", String(4 + cell.x * 92));
    rect.setAttribute("y", String(4 + cell.y * 92));
    rect.setAttribute("width", String(Math.max(cell.w * 92 - 2, 1)));
    rect.setAttribute("height", String(Math.max(cell.h * 92 - 2, 1)));
    rect.setAttribute("fill", "#C8D4E3");
    rect.setAttribute("stroke", "#5A7184");
    svg.append(rect);
  }
  return svg;
}

export function mountLayoutView(container: HTMLElement, ctx: ViewContext): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const frame = ctx.session.storyframe;
  if (!frame) {
    container.append(el(doc, "p", { class: "empty" }, "Create a project first."));
    return;
  }
  const root = el(doc, "div", { class: "layout-view" });
  const cards = el(doc, "div", { class: "layout-cards" });
  const preview = el(doc, "div", { class: "layout-preview" });
  root.append(cards, preview);
  container.append(root);

  const renderCards = () => {
    cards.replaceChildren();
    const ranking = ctx.session.ranking;
    const order = ranking ? ranking.order : LAYOUT_KINDS;
    for (const layout of order) {
      const card = el(doc, "button", { class: "layout-card", type: "button", "data-layout": layout });
      card.append(thumbnail(doc, layout, frame.pieces.length));
      const score = ranking ? ` (${ranking.scores[layout]})` : "";
      card.append(el(doc, "span", { class: "layout-name" }, `${layout}${score}`));
      if (ctx.session.layout === layout) {
        card.classList.add("selected");
      }
      card.addEventListener("click", () => {
        ctx.busy(
          ctx.session.selectLayout(layout).then(() => {
            preview.innerHTML = ctx.session.svg ?? "";
            renderCards();
          }),
        );
      });
      cards.append(card);
    }
    const next = el(doc, "button", { class: "to-canvas", type: "button" }, "Open canvas");
    next.addEventListener("click", () => ctx.navigate("canvas"));
    cards.append(next);
  };

  ctx.busy(ctx.session.fetchRanking().then(renderCards));
}
