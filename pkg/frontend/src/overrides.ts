// Positional override bookkeeping. Overrides live separately from solver
// output and re-apply by stable SVG id, so re-solving never eats manual edits.

import type { Override } from "./types.js";

export function blankOverride(id: string): Override {
  return { id, dx: 0, dy: 0, sx: 1, sy: 1 };
}

/** Merge a drag delta into the override set, dropping no-op entries. */
export function applyDrag(overrides: Override[], id: string, dx: number, dy: number): Override[] {
  const existing = overrides.find((o) => o.id === id) ?? blankOverride(id);
  const merged: Override = { ...existing, dx: existing.dx + dx, dy: existing.dy + dy };
  const rest = overrides.filter((o) => o.id !== id);
  if (isNoop(merged)) {
    return rest;
  }
  return [...rest, merged];
}

export function applyScale(overrides: Override[], id: string, sx: number, sy: number): Override[] {
  const existing = overrides.find((o) => o.id === id) ?? blankOverride(id);
  const merged: Override = { ...existing, sx: existing.sx * sx, sy: existing.sy * sy };
  const rest = overrides.filter((o) => o.id !== id);
  return isNoop(merged) ? rest : [...rest, merged];
}

export function isNoop(override: Override): boolean {
  return override.dx === 0 && override.dy === 0 && override.sx === 1 && override.sy === 1;
}

/** The transform string the renderer emits for an override. */
export function transformFor(override: Override): string {
  const parts: string[] = [];
  if (override.dx !== 0 || override.dy !== 0) {
    parts.push(`translate(${fmt(override.dx)} ${fmt(override.dy)})`);
  }
  if (override.sx !== 1 || override.sy !== 1) {
    parts.push(`scale(${fmt(override.sx)} ${fmt(override.sy)})`);
  }
  return parts.join(" ");
}

function fmt(value: number): string {
  const rounded = Math.round(value * 1e6) / 1e6;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}
