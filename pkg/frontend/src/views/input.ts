// Input view: paste a document, define the story goal, kick off construction.

import { el, type ViewContext } from "../context.js";

export function mountInputView(container: HTMLElement, ctx: ViewContext): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  const form = el(doc, "form", { class: "input-view" });
  const textArea = el(doc, "textarea", {
    class: "source-text",
    rows: "14",
    placeholder: "Paste the source text (plain text)",
  });
  const goalInput = el(doc, "input", {
    class: "goal",
    type: "text",
    placeholder: "What story should the infographic tell?",
  });
  const seedInput = el(doc, "input", { class: "seed", type: "number", value: "7", title: "provider seed" });
  const submit = el(doc, "button", { class: "upload", type: "submit" }, "Upload");

  form.append(
    el(doc, "label", {}, "Document"),
    textArea,
    el(doc, "label", {}, "Story goal"),
    goalInput,
    el(doc, "label", {}, "Seed"),
    seedInput,
    submit,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = textArea.value;
    const goal = goalInput.value;
    if (!text.trim() || !goal.trim()) {
      return;
    }
    const seed = Number.parseInt(seedInput.value, 10);
    ctx.busy(
      ctx.session.create(text, goal, Number.isNaN(seed) ? undefined : seed).then(() => ctx.navigate("story")),
    );
  });
  container.append(form);
}
