// Story view: pieces with relation badges, unit cards with editable designs.
// Every edit round-trips through PUT storyframe; the view re-renders from the
// server's response, never from local state alone.

import { el, type ViewContext } from "../context.js";
import type { StoryFrame, StoryPiece, StoryUnit } from "../types.js";

function cloneFrame(frame: StoryFrame): StoryFrame {
  return JSON.parse(JSON.stringify(frame)) as StoryFrame;
}

function relationBadges(doc: Document, frame: StoryFrame, piece: StoryPiece): HTMLElement {
  const badges = el(doc, "span", { class: "relations" });
  badges.append(el(doc, "span", { class: "badge goal-relation" }, piece.relation_to_goal));
  for (const rel of frame.relations) {
    if (rel.from_id === piece.id) {
      badges.append(el(doc, "span", { class: "badge piece-relation" }, `${rel.kind} → ${rel.to_id}`));
    }
  }
  return badges;
}

export function mountStoryView(container: HTMLElement, ctx: ViewContext): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const frame = ctx.session.storyframe;
  if (!frame) {
    container.append(el(doc, "p", { class: "empty" }, "Create a project in the input view first."));
    return;
  }

  const save = (mutate: (draft: StoryFrame) => void) => {
    const draft = cloneFrame(frame);
    mutate(draft);
    ctx.busy(ctx.session.saveFrame(draft).then(() => mountStoryView(container, ctx)));
  };

  const root = el(doc, "div", { class: "story-view" });
  root.append(el(doc, "h2", {}, frame.title));

  frame.pieces.forEach((piece, pieceIndex) => {
    const card = el(doc, "section", { class: "sp-card", "data-piece": piece.id });
    const header = el(doc, "header", {});
    const subtitleInput = el(doc, "input", { class: "subtitle", value: piece.subtitle });
    subtitleInput.addEventListener("change", () =>
      save((draft) => {
        draft.pieces[pieceIndex].subtitle = subtitleInput.value;
      }),
    );
    const deletePiece = el(doc, "button", { class: "delete-piece", type: "button" }, "Delete piece");
    deletePiece.addEventListener("click", () =>
      save((draft) => {
        draft.pieces.splice(pieceIndex, 1);
        draft.relations = draft.relations.filter((r) => r.from_id !== piece.id && r.to_id !== piece.id);
      }),
    );
    header.append(subtitleInput, relationBadges(doc, frame, piece), deletePiece);
    card.append(header);

    piece.units.forEach((unit, unitIndex) => {
      card.append(unitCard(doc, save, unit, pieceIndex, unitIndex));
    });
    root.append(card);
  });

  const next = el(doc, "button", { class: "to-stylization", type: "button" }, "Continue to stylization");
  next.addEventListener("click", () => ctx.navigate("stylization"));
  root.append(next);
  container.append(root);
}

function unitCard(
  doc: Document,
  save: (mutate: (draft: StoryFrame) => void) => void,
  unit: StoryUnit,
  pieceIndex: number,
  unitIndex: number,
): HTMLElement {
  const card = el(doc, "article", { class: "su-card", "data-unit": unit.id });
  card.append(el(doc, "span", { class: "badge insight" }, unit.insight));

  const textArea = el(doc, "textarea", { class: "unit-text", rows: "2" });
  textArea.value = unit.text;
  textArea.addEventListener("change", () =>
    save((draft) => {
      const target = draft.pieces[pieceIndex].units[unitIndex];
      target.text = textArea.value;
      // Spans index the old text; they cannot survive a rewrite.
      target.primary_highlight = null;
      target.secondary_highlights = [];
    }),
  );
  card.append(textArea);

  const highlights = el(doc, "ul", { class: "highlights" });
  const spans: { label: string; role: "primary" | "secondary"; index: number }[] = [];
  if (unit.primary_highlight) {
    spans.push({
      label: unit.text.slice(unit.primary_highlight.start, unit.primary_highlight.end),
      role: "primary",
      index: -1,
    });
  }
  unit.secondary_highlights.forEach((span, index) =>
    spans.push({ label: unit.text.slice(span.start, span.end), role: "secondary", index }),
  );
  for (const span of spans) {
    const item = el(doc, "li", { class: `highlight ${span.role}` });
    item.append(el(doc, "span", {}, span.label));
    const remove = el(
      doc,
      "button",
      { class: "delete-highlight", type: "button", "data-role": span.role },
      "×",
    );
    remove.addEventListener("click", () =>
      save((draft) => {
        const target = draft.pieces[pieceIndex].units[unitIndex];
        if (span.role === "primary") {
          target.primary_highlight = null;
        } else {
          target.secondary_highlights.splice(span.index, 1);
        }
      }),
    );
    item.append(remove);
    highlights.append(item);
  }
  card.append(highlights);

  const iconInput = el(doc, "input", { class: "icon-keyword", value: unit.icon_keyword ?? "" });
  iconInput.addEventListener("change", () =>
    save((draft) => {
      draft.pieces[pieceIndex].units[unitIndex].icon_keyword = iconInput.value.trim() || null;
    }),
  );
  card.append(el(doc, "label", {}, "Icon keyword"), iconInput);

  if (unit.chart) {
    const chartRow = el(doc, "div", { class: "chart-row" });
    chartRow.append(el(doc, "span", { class: "badge chart" }, unit.chart.kind));
    const removeChart = el(doc, "button", { class: "delete-chart", type: "button" }, "Remove chart");
    removeChart.addEventListener("click", () =>
      save((draft) => {
        draft.pieces[pieceIndex].units[unitIndex].chart = null;
      }),
    );
    chartRow.append(removeChart);
    card.append(chartRow);
  }

  const deleteUnit = el(doc, "button", { class: "delete-unit", type: "button" }, "Delete unit");
  deleteUnit.addEventListener("click", () =>
    save((draft) => {
      draft.pieces[pieceIndex].units.splice(unitIndex, 1);
    }),
  );
  card.append(deleteUnit);
  return card;
}
