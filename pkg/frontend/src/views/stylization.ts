// Stylization view: palette and font suggestions, refreshable and hand-editable.

import { el, type ViewContext } from "../context.js";
import type { StoryFrame } from "../types.js";

let refreshCounter = 100;

export function mountStylizationView(container: HTMLElement, ctx: ViewContext): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const frame = ctx.session.storyframe;
  if (!frame) {
    container.append(el(doc, "p", { class: "empty" }, "Create a project first."));
    return;
  }
  const style = frame.stylization;
  const root = el(doc, "div", { class: "stylization-view" });

  const save = (mutate: (draft: StoryFrame) => void) => {
    const draft = JSON.parse(JSON.stringify(frame)) as StoryFrame;
    mutate(draft);
    ctx.busy(ctx.session.saveFrame(draft).then(() => mountStylizationView(container, ctx)));
  };

  const palette = el(doc, "div", { class: "palette" });
  style.theme_colors.forEach((color, index) => {
    const swatch = el(doc, "input", { type: "color", class: "swatch", value: color });
    swatch.addEventListener("change", () =>
      save((draft) => {
        draft.stylization.theme_colors[index] = swatch.value.toUpperCase();
      }),
    );
    palette.append(swatch);
  });
  const background = el(doc, "input", { type: "color", class: "background-swatch", value: style.background });
  background.addEventListener("change", () =>
    save((draft) => {
      draft.stylization.background = background.value.toUpperCase();
    }),
  );
  root.append(el(doc, "h3", {}, "Theme colors"), palette, el(doc, "h3", {}, "Background"), background);

  const fonts = el(doc, "dl", { class: "fonts" });
  (Object.keys(style.fonts) as (keyof typeof style.fonts)[]).forEach((role) => {
    fonts.append(el(doc, "dt", {}, role));
    const input = el(doc, "input", { class: `font-${role}`, value: style.fonts[role] });
    input.addEventListener("change", () =>
      save((draft) => {
        draft.stylization.fonts[role] = input.value;
      }),
    );
    const dd = el(doc, "dd", {});
    dd.append(input);
    fonts.append(dd);
  });
  root.append(el(doc, "h3", {}, "Fonts"), fonts);

  const refresh = el(doc, "button", { class: "refresh-stylization", type: "button" }, "Refresh palette");
  refresh.addEventListener("click", () => {
    refreshCounter += 1;
    ctx.busy(ctx.session.refreshStylization(refreshCounter).then(() => mountStylizationView(container, ctx)));
  });
  const next = el(doc, "button", { class: "to-layout", type: "button" }, "Continue to layout");
  next.addEventListener("click", () => ctx.navigate("layout"));
  root.append(refresh, next);
  container.append(root);
}
