"""Standalone SVG rendering of a frame against its blueprint.

Every story piece, story unit, and visual design becomes a group with a
stable id ("sf-" plus the domain id), which is the contract the editor uses
to address elements. Output is deterministic: fixed attribute order, fixed
number formatting, no timestamps.
"""

from __future__ import annotations

import math
import re
from xml.sax.saxutils import escape, quoteattr

from .blueprint import Blueprint, Rect
from .docio import Override
from .glyphs import GlyphMetrics, default_glyph_metrics
from .model import ChartKind, ChartSpec, StoryFrame, StoryUnit, Stylization
from .providers import IconAsset, placeholder_icon

LINE_SPACING = 1.4
BAR_MAX_SHARE = 0.9  # tallest bar fills this share of the chart box height
PICTOGRAPH_DIM_OPACITY = 0.3
ELLIPSIS = "…"


class RenderError(ValueError):
    pass


def _fmt(value: float) -> str:
    rounded = round(value, 6)
    if rounded == 0:
        rounded = 0.0
    text = f"{rounded:.6f}".rstrip("0").rstrip(".")
    return text if text else "0"


def _num(value: float) -> str:
    """Short human label for a chart value."""
    if float(value).is_integer():
        return str(int(value))
    return _fmt(value)


def _ident(domain_id: str) -> str:
    # Ids go into XML id attributes: keep word characters and dashes.
    return "sf-" + re.sub(r"[^\w.-]", "_", domain_id)


class _Doc:
    def __init__(self) -> None:
        self.parts: list[str] = []

    def open(self, tag: str, **attrs: str | float | None) -> None:
        self.parts.append(self._tag(tag, attrs, close=False))

    def close(self, tag: str) -> None:
        self.parts.append(f"</{tag}>")

    def leaf(self, tag: str, **attrs: str | float | None) -> None:
        self.parts.append(self._tag(tag, attrs, close=True))

    def text_node(self, tag: str, content: str, **attrs: str | float | None) -> None:
        self.parts.append(self._tag(tag, attrs, close=False) + escape(content) + f"</{tag}>")

    def raw(self, markup: str) -> None:
        self.parts.append(markup)

    @staticmethod
    def _tag(tag: str, attrs: dict, close: bool) -> str:
        rendered = []
        for key, value in attrs.items():
            if value is None:
                continue
            name = key.replace("_", "-")
            if isinstance(value, float):
                value = _fmt(value)
            rendered.append(f"{name}={quoteattr(str(value))}")
        body = " ".join([tag] + rendered)
        return f"<{body}/>" if close else f"<{body}>"

    def result(self) -> str:
        return "".join(self.parts)


# --- charts ---------------------------------------------------------------


def _polar(cx: float, cy: float, r: float, angle_deg: float) -> tuple[float, float]:
    rad = math.radians(angle_deg)
    return cx + r * math.cos(rad), cy + r * math.sin(rad)


def _pie_slices(doc: _Doc, box: Rect, fractions: list[float], colors: list[str]) -> None:
    cx, cy = box.x + box.w / 2.0, box.y + box.h / 2.0
    r = 0.45 * min(box.w, box.h)
    angle = -90.0  # start at 12 o'clock, sweep clockwise
    for i, fraction in enumerate(fractions):
        sweep = fraction * 360.0
        if sweep <= 0:
            continue
        if sweep >= 360.0 - 1e-9:
            doc.leaf("circle", cx=cx, cy=cy, r=r, fill=colors[i % len(colors)], **{"class": "slice"})
            angle += sweep
            continue
        x0, y0 = _polar(cx, cy, r, angle)
        x1, y1 = _polar(cx, cy, r, angle + sweep)
        large = 1 if sweep > 180.0 else 0
        path = (
            f"M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} "
            f"A {_fmt(r)} {_fmt(r)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} Z"
        )
        # data-angle carries the exact sweep (shortest round-trip form) so the
        # 360-degree sum invariant survives attribute parsing.
        doc.leaf("path", d=path, fill=colors[i % len(colors)], **{"class": "slice", "data-angle": repr(sweep)})
        angle += sweep


def render_chart(spec: ChartSpec, box: Rect, stylization: Stylization) -> str:
    """SVG fragment for one chart inside `box` (no surrounding group)."""
    if box.w <= 0 or box.h <= 0:
        raise RenderError(f"chart box must be positive, got {box.w} x {box.h}")
    doc = _Doc()
    theme = list(stylization.theme_colors)

    if spec.kind is ChartKind.PIE:
        total = sum(value for _, value in spec.series)
        if total <= 0:
            raise RenderError("pie chart needs a positive value total")
        _pie_slices(doc, box, [value / total for _, value in spec.series], theme)

    elif spec.kind is ChartKind.SINGLE_PIE:
        cx, cy = box.x + box.w / 2.0, box.y + box.h / 2.0
        r = 0.45 * min(box.w, box.h)
        doc.leaf("circle", cx=cx, cy=cy, r=r, fill=theme[1 % len(theme)], opacity=0.25, **{"class": "slice-rest"})
        _pie_slices(doc, box, [spec.single_value / 100.0], theme)

    elif spec.kind is ChartKind.BAR:
        peak = max(value for _, value in spec.series)
        if peak <= 0:
            raise RenderError("bar chart needs a positive maximum")
        n = len(spec.series)
        slot = box.w / n
        bar_w = slot * 0.7
        label_size = 0.09 * box.h
        scale = (BAR_MAX_SHARE * box.h) / peak
        for i, (label, value) in enumerate(spec.series):
            bar_h = value * scale
            bx = box.x + i * slot + (slot - bar_w) / 2.0
            by = box.y2 - bar_h
            doc.leaf(
                "rect",
                x=bx,
                y=by,
                width=bar_w,
                height=bar_h,
                fill=theme[i % len(theme)],
                **{"class": "bar", "data-label": label, "data-value": _num(value)},
            )
            doc.text_node(
                "text",
                _num(value),
                x=bx + bar_w / 2.0,
                y=max(box.y + label_size, by - 0.3 * label_size),
                font_size=label_size,
                text_anchor="middle",
                fill=stylization.text_colors["regular"],
                **{"class": "bar-label"},
            )

    elif spec.kind is ChartKind.LINE:
        values = [value for _, value in spec.series]
        lo, hi = min(values), max(values)
        span = hi - lo if hi > lo else 1.0
        pad = 0.1 * box.h
        n = len(values)
        points = []
        for i, value in enumerate(values):
            px = box.x + (box.w * i / (n - 1))
            py = box.y2 - pad - (value - lo) / span * (box.h - 2 * pad)
            points.append((px, py))
        doc.leaf(
            "polyline",
            points=" ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points),
            fill="none",
            stroke=theme[0],
            stroke_width=max(1.0, 0.01 * box.w),
            **{"class": "line"},
        )
        label_size = 0.09 * box.h
        for idx in (0, n - 1):
            px, py = points[idx]
            doc.text_node(
                "text",
                _num(values[idx]),
                x=px,
                y=max(box.y + label_size, py - 0.4 * label_size),
                font_size=label_size,
                text_anchor="middle" if 0 < idx < n - 1 else ("start" if idx == 0 else "end"),
                fill=stylization.text_colors["regular"],
                **{"class": "line-label"},
            )

    elif spec.kind is ChartKind.PICTOGRAPH:
        numerator, denominator = spec.fraction
        cols = min(5, denominator)
        rows = math.ceil(denominator / cols)
        cell_w, cell_h = box.w / cols, box.h / rows
        size = 0.8 * min(cell_w, cell_h)
        for i in range(denominator):
            row, col = divmod(i, cols)
            cx = box.x + col * cell_w + cell_w / 2.0
            top = box.y + row * cell_h + (cell_h - size) / 2.0
            opacity = 1.0 if i < numerator else PICTOGRAPH_DIM_OPACITY
            head_r = 0.18 * size
            doc.open("g", opacity=opacity, **{"class": "unit-glyph"})
            doc.leaf("circle", cx=cx, cy=top + head_r, r=head_r, fill=theme[0])
            doc.leaf(
                "rect",
                x=cx - 0.28 * size,
                y=top + 2.2 * head_r,
                width=0.56 * size,
                height=size - 2.2 * head_r,
                rx=0.14 * size,
                fill=theme[0],
            )
            doc.close("g")

    else:
        raise RenderError(f"unsupported chart kind {spec.kind!r}")

    return doc.result()


# --- text -----------------------------------------------------------------


def _segments(unit: StoryUnit) -> list[tuple[str, str]]:
    """Split unit text into (text, role) runs by highlight membership."""
    boundaries = {0, len(unit.text)}
    roles: list[tuple[int, int, str]] = []
    if unit.primary_highlight:
        span = unit.primary_highlight
        roles.append((span.start, span.end, "primary"))
        boundaries.update((span.start, span.end))
    for span in unit.secondary_highlights:
        roles.append((span.start, span.end, "secondary"))
        boundaries.update((span.start, span.end))
    cuts = sorted(boundaries)
    out = []
    for start, end in zip(cuts, cuts[1:]):
        role = "regular"
        for r_start, r_end, r_role in roles:
            if r_start <= start and end <= r_end:
                role = r_role
                break
        if end > start:
            out.append((unit.text[start:end], role))
    return out


def _wrap(
    segments: list[tuple[str, str]],
    width: float,
    size: float,
    metrics: GlyphMetrics,
) -> list[list[tuple[str, str]]]:
    """Greedy word wrap of role-tagged text to `width` at glyph height `size`."""
    atoms: list[tuple[str, str, bool]] = []  # (token, role, glued to previous)
    pending_space = False
    for seg_text, role in segments:
        for token in re.split(r"(\s+)", seg_text):
            if not token:
                continue
            if token.isspace():
                pending_space = True
                continue
            atoms.append((token, role, bool(atoms) and not pending_space))
            pending_space = False

    space_w = metrics.ratio(" ") * size
    lines: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    current_w = 0.0
    for token, role, glued in atoms:
        token_w = metrics.ratio_sum(token) * size
        lead = 0.0 if (not current or glued) else space_w
        if current and current_w + lead + token_w > width + 1e-9:
            lines.append(current)
            current = [(token, role)]
            current_w = token_w
        else:
            if current and not glued:
                current.append((" ", "regular"))
                current_w += space_w
            current.append((token, role))
            current_w += token_w
    if current:
        lines.append(current)
    return lines


def _emit_wrapped_text(
    doc: _Doc,
    unit: StoryUnit,
    box: Rect,
    size: float,
    stylization: Stylization,
    metrics: GlyphMetrics,
    warnings: list[str],
) -> None:
    if not unit.text or box.w <= 0 or box.h < size:
        if unit.text:
            warnings.append(f"text omitted for unit {unit.id}: no room")
        return
    lines = _wrap(_segments(unit), box.w, size, metrics)
    max_lines = max(1, int((box.h + 1e-9) // (LINE_SPACING * size)))
    truncated = len(lines) > max_lines
    if truncated:
        lines = lines[:max_lines]
        lines[-1] = lines[-1] + [(ELLIPSIS, "regular")]
        warnings.append(f"text truncated for unit {unit.id}")
    colors = {
        "regular": stylization.text_colors["regular"],
        "primary": stylization.text_colors["primary_highlight"],
        "secondary": stylization.text_colors["secondary_highlight"],
    }
    for i, line in enumerate(lines):
        baseline = box.y + i * LINE_SPACING * size + 0.8 * size
        doc.open(
            "text",
            x=box.x,
            y=baseline,
            font_size=size,
            font_family=stylization.fonts["regular"],
            fill=colors["regular"],
            **{"class": "body", "xml:space": "preserve"},
        )
        for token, role in line:
            if role == "regular":
                doc.raw(escape(token))
            else:
                doc.raw(
                    f'<tspan fill={quoteattr(colors[role])} font-weight="bold" '
                    f'class={quoteattr("hl-" + role)}>{escape(token)}</tspan>'
                )
        doc.close("text")


def _fit_text_line(text: str, width: float, size: float, metrics: GlyphMetrics) -> str:
    """Clip a single line to `width`, appending an ellipsis when clipped."""
    if metrics.ratio_sum(text) * size <= width:
        return text
    ell_w = metrics.ratio(ELLIPSIS) * size
    out = []
    used = 0.0
    for char in text:
        w = metrics.ratio(char) * size
        if used + w + ell_w > width:
            break
        out.append(char)
        used += w
    return "".join(out) + ELLIPSIS


# --- document -------------------------------------------------------------


def _transform_for(override: Override | None) -> str | None:
    if override is None:
        return None
    parts = []
    if override.dx or override.dy:
        parts.append(f"translate({_fmt(override.dx)} {_fmt(override.dy)})")
    if override.sx != 1.0 or override.sy != 1.0:
        parts.append(f"scale({_fmt(override.sx)} {_fmt(override.sy)})")
    return " ".join(parts) if parts else None


def _spiral_path_d(points: tuple[tuple[float, float], ...]) -> str:
    commands = [f"M {_fmt(points[0][0])} {_fmt(points[0][1])}"]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if y0 == y1:
            commands.append(f"L {_fmt(x1)} {_fmt(y1)}")
        else:
            r = abs(y1 - y0) / 2.0
            sweep = 1 if x0 <= 1e-9 else 0  # bulge into the canvas at either edge
            commands.append(f"A {_fmt(r)} {_fmt(r)} 0 0 {sweep} {_fmt(x1)} {_fmt(y1)}")
    return " ".join(commands)


def render(
    frame: StoryFrame,
    blueprint: Blueprint,
    stylization: Stylization | None = None,
    assets: dict[str, IconAsset] | None = None,
    overrides: list[Override] | None = None,
    warnings: list[str] | None = None,
    metrics: GlyphMetrics | None = None,
) -> str:
    """Render the full infographic document; never fails for missing icons."""
    stylization = stylization or frame.stylization
    assets = assets or {}
    metrics = metrics or default_glyph_metrics()
    sink = warnings if warnings is not None else []
    override_by_id = {o.id: o for o in (overrides or [])}
    used_overrides: set[str] = set()

    frame_piece_ids = [piece.id for piece in frame.pieces]
    bp_piece_ids = [sp.piece_id for sp in blueprint.sp_boxes]
    if set(frame_piece_ids) != set(bp_piece_ids):
        missing = set(frame_piece_ids) ^ set(bp_piece_ids)
        raise RenderError(f"frame and blueprint disagree on piece ids: {sorted(missing)}")
    units_by_id = {unit.id: unit for piece in frame.pieces for unit in piece.units}
    bp_unit_ids = [su.unit_id for sp in blueprint.sp_boxes for su in sp.units]
    if set(units_by_id) != set(bp_unit_ids):
        missing = set(units_by_id) ^ set(bp_unit_ids)
        raise RenderError(f"frame and blueprint disagree on unit ids: {sorted(missing)}")

    fonts = blueprint.font_heights()
    x = blueprint.x
    doc = _Doc()
    width, height = blueprint.canvas.width, blueprint.canvas.height
    doc.open(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=width,
        height=height,
        viewBox=f"0 0 {_fmt(width)} {_fmt(height)}",
    )
    doc.leaf("rect", x=0.0, y=0.0, width=width, height=height, fill=stylization.background, **{"class": "background"})

    if blueprint.spiral_path:
        doc.leaf(
            "path",
            d=_spiral_path_d(blueprint.spiral_path),
            fill="none",
            stroke=stylization.theme_colors[1 % len(stylization.theme_colors)],
            stroke_width=0.5 * x,
            **{"class": "spiral-path"},
        )

    if blueprint.center_box is not None:
        center = blueprint.center_box
        doc.open("g", id="sf-star-center", **{"class": "star-center"})
        doc.leaf(
            "ellipse",
            cx=center.x + center.w / 2.0,
            cy=center.y + center.h / 2.0,
            rx=center.w / 2.0,
            ry=center.h / 2.0,
            fill=stylization.theme_colors[1 % len(stylization.theme_colors)],
            opacity=0.25,
        )
        doc.close("g")

    # Title band.
    title_size = fonts["title"]
    doc.open("g", id="sf-title", **{"class": "title"})
    doc.text_node(
        "text",
        _fit_text_line(frame.title, blueprint.title_box.w, title_size, metrics),
        x=blueprint.title_box.x + blueprint.title_box.w / 2.0,
        y=blueprint.title_box.y + 0.8 * title_size,
        font_size=title_size,
        font_family=stylization.fonts["title"],
        fill=stylization.text_colors["regular"],
        text_anchor="middle",
    )
    doc.close("g")

    for sp in blueprint.sp_boxes:
        piece = frame.piece_by_id(sp.piece_id)
        group_id = _ident(piece.id)
        override = override_by_id.get(group_id)
        if override:
            used_overrides.add(group_id)
        doc.open("g", id=group_id, transform=_transform_for(override), **{"class": "sp"})
        if sp.subtitle_box is not None and piece.subtitle:
            subtitle_size = fonts["subtitle"]
            doc.text_node(
                "text",
                _fit_text_line(piece.subtitle, sp.subtitle_box.w, subtitle_size, metrics),
                x=sp.subtitle_box.x,
                y=sp.subtitle_box.y + 0.8 * subtitle_size,
                font_size=subtitle_size,
                font_family=stylization.fonts["subtitle"],
                fill=stylization.text_colors["regular"],
                **{"class": "subtitle"},
            )
        for su in sp.units:
            unit = units_by_id[su.unit_id]
            unit_gid = _ident(unit.id)
            unit_override = override_by_id.get(unit_gid)
            if unit_override:
                used_overrides.add(unit_gid)
            doc.open("g", id=unit_gid, transform=_transform_for(unit_override), **{"class": "su"})

            if su.highlight_box is not None and unit.all_highlights():
                hl_size = fonts["highlight"]
                doc.open("g", id=f"{unit_gid}-highlight", **{"class": "highlight"})
                cursor = su.highlight_box.x
                for span, role in [(unit.primary_highlight, "primary")] + [
                    (s, "secondary") for s in unit.secondary_highlights
                ]:
                    if span is None:
                        continue
                    room = su.highlight_box.x2 - cursor
                    if room <= 0:
                        break
                    piece_text = _fit_text_line(span.slice(unit.text), room, hl_size, metrics)
                    color = stylization.text_colors["primary_highlight" if role == "primary" else "secondary_highlight"]
                    doc.text_node(
                        "text",
                        piece_text,
                        x=cursor,
                        y=su.highlight_box.y + 0.8 * hl_size,
                        font_size=hl_size,
                        font_family=stylization.fonts["highlight"],
                        font_weight="bold",
                        fill=color,
                        **{"class": f"hl-{role}"},
                    )
                    cursor += metrics.ratio_sum(piece_text + " ") * hl_size
                doc.close("g")

            if su.text_box is not None:
                doc.open("g", id=f"{unit_gid}-text", **{"class": "text"})
                _emit_wrapped_text(doc, unit, su.text_box, fonts["regular"], stylization, metrics, sink)
                doc.close("g")

            if su.icon_box is not None and unit.icon_keyword:
                asset = assets.get(unit.icon_keyword)
                if asset is None:
                    asset = placeholder_icon(unit.icon_keyword, stylization, fallback_reason="asset missing at render")
                    sink.append(f"icon for {unit.icon_keyword!r} missing; placeholder used")
                elif asset.fallback_reason:
                    sink.append(f"icon for {unit.icon_keyword!r} fell back: {asset.fallback_reason}")
                box = su.icon_box
                if box.w > 0 and box.h > 0:
                    doc.open(
                        "g",
                        id=f"{unit_gid}-icon",
                        transform=(
                            f"translate({_fmt(box.x)} {_fmt(box.y)}) scale({_fmt(box.w / 100.0)} {_fmt(box.h / 100.0)})"
                        ),
                        **{"class": "icon"},
                    )
                    doc.raw(asset.markup)
                    doc.close("g")

            if su.chart_box is not None and unit.chart is not None and su.chart_box.w > 0 and su.chart_box.h > 0:
                doc.open("g", id=f"{unit_gid}-chart", **{"class": f"chart chart-{unit.chart.kind.value}"})
                doc.raw(render_chart(unit.chart, su.chart_box, stylization))
                doc.close("g")

            doc.close("g")
        doc.close("g")

    doc.close("svg")

    for missing_id in sorted(set(override_by_id) - used_overrides):
        sink.append(f"override target {missing_id!r} not found")

    return '<?xml version="1.0" encoding="UTF-8"?>\n' + doc.result() + "\n"
