"""Per-unit design placement inside a solved unit box.

For a unit carrying an icon and/or a chart, the placer walks a fixed grid of
placement strategies and height-to-width ratios, takes the first combination
whose boxes fit without overlap, and otherwise keeps the least-overlapping
combination and shrinks the icon and chart by the smallest factor that
resolves it. The body text always gets the largest remaining rectangular
block. Everything is deterministic: fixed enumeration order, no randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .glyphs import GlyphMetrics, text_width
from .model import StoryUnit

# Enumeration order is part of the contract: first zero-overlap combination wins.
STRATEGIES = (
    "icon_left_text_right",
    "icon_right_text_left",
    "icon_top_text_bottom",
    "chart_bottom_text_top",
    "chart_right_text_left",
    "icon_top_left_chart_bottom_text_right",
)
ASPECTS = (1.0, 4.0 / 3.0, 3.0 / 4.0, 16.0 / 9.0)

_STRATEGY_SLOTS = {
    "icon_left_text_right": frozenset({"icon"}),
    "icon_right_text_left": frozenset({"icon"}),
    "icon_top_text_bottom": frozenset({"icon"}),
    "chart_bottom_text_top": frozenset({"chart"}),
    "chart_right_text_left": frozenset({"chart"}),
    "icon_top_left_chart_bottom_text_right": frozenset({"icon", "chart"}),
}

_EPS = 1e-9
_SHRINK_TOL = 1e-4
_SHRINK_ITERATIONS = 60


class PlacementError(ValueError):
    def __init__(self, unit_id: str, message: str):
        self.unit_id = unit_id
        super().__init__(f"unit {unit_id!r}: {message}")


# Local rect tuple (x, y, w, h) to avoid an import cycle with the blueprint
# module; converted at the boundary.
_R = tuple[float, float, float, float]


def _area(r: _R) -> float:
    return r[2] * r[3]


def _intersection(a: _R, b: _R) -> float:
    dx = min(a[0] + a[2], b[0] + b[2]) - max(a[0], b[0])
    dy = min(a[1] + a[3], b[1] + b[3]) - max(a[1], b[1])
    return dx * dy if dx > 0 and dy > 0 else 0.0


def _inside(outer: _R, inner: _R, eps: float = 1e-6) -> bool:
    return (
        inner[0] >= outer[0] - eps
        and inner[1] >= outer[1] - eps
        and inner[0] + inner[2] <= outer[0] + outer[2] + eps
        and inner[1] + inner[3] <= outer[1] + outer[3] + eps
    )


@dataclass(frozen=True)
class SUBox:
    """Solved geometry for one story unit."""

    unit_id: str
    rect: "Rect"
    highlight_box: "Rect | None"
    text_box: "Rect"
    icon_box: "Rect | None"
    chart_box: "Rect | None"
    chosen_strategy: str
    chosen_aspect: float | None


def largest_empty_rect(region: _R, obstacles: list[_R]) -> _R:
    """Largest axis-aligned empty rectangle inside `region` avoiding the
    obstacles' interiors. Deterministic: scans candidate edges in ascending
    order and keeps the first maximum."""
    rx, ry, rw, rh = region
    xs = sorted({rx, rx + rw} | {min(max(v, rx), rx + rw) for o in obstacles for v in (o[0], o[0] + o[2])})
    ys = sorted({ry, ry + rh} | {min(max(v, ry), ry + rh) for o in obstacles for v in (o[1], o[1] + o[3])})

    best: _R = (rx, ry, 0.0, 0.0)
    best_area = 0.0
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            for k in range(len(ys)):
                for l in range(k + 1, len(ys)):
                    cand = (xs[i], ys[k], xs[j] - xs[i], ys[l] - ys[k])
                    if _area(cand) <= best_area:
                        continue
                    if all(_intersection(cand, o) <= _EPS for o in obstacles):
                        best = cand
                        best_area = _area(cand)
    return best


def _design_dims(base_area: float, aspect: float) -> tuple[float, float]:
    """Width and height for a design box of the given area and w:h ratio."""
    w = math.sqrt(base_area * aspect)
    h = math.sqrt(base_area / aspect)
    return w, h


def _positioned(strategy: str, region: _R, icon: tuple[float, float] | None, chart: tuple[float, float] | None) -> dict[str, _R]:
    rx, ry, rw, rh = region
    boxes: dict[str, _R] = {}
    if icon is not None:
        iw, ih = icon
        if strategy == "icon_left_text_right":
            boxes["icon"] = (rx, ry + (rh - ih) / 2.0, iw, ih)
        elif strategy == "icon_right_text_left":
            boxes["icon"] = (rx + rw - iw, ry + (rh - ih) / 2.0, iw, ih)
        elif strategy == "icon_top_text_bottom":
            boxes["icon"] = (rx + (rw - iw) / 2.0, ry, iw, ih)
        elif strategy == "icon_top_left_chart_bottom_text_right":
            boxes["icon"] = (rx, ry, iw, ih)
    if chart is not None:
        cw, ch = chart
        if strategy == "chart_bottom_text_top":
            boxes["chart"] = (rx + (rw - cw) / 2.0, ry + rh - ch, cw, ch)
        elif strategy == "chart_right_text_left":
            boxes["chart"] = (rx + rw - cw, ry + (rh - ch) / 2.0, cw, ch)
        elif strategy == "icon_top_left_chart_bottom_text_right":
            boxes["chart"] = (rx + rw - cw, ry + rh - ch, cw, ch)
    return boxes


def _evaluate(strategy: str, aspect: float, region: _R, base_area: float, has_icon: bool, has_chart: bool, scale: float) -> dict[str, _R]:
    icon = _design_dims(base_area * scale * scale, aspect) if has_icon else None
    chart = _design_dims(base_area * scale * scale, aspect) if has_chart else None
    return _positioned(strategy, region, icon, chart)


def _overlap_metric(region: _R, boxes: dict[str, _R]) -> float:
    values = list(boxes.values())
    total = 0.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            total += _intersection(values[i], values[j])
    for box in values:
        total += _area(box) - _intersection(box, region)
    return total


def _fits(region: _R, boxes: dict[str, _R], need_text: bool, x: float) -> bool:
    values = list(boxes.values())
    for box in values:
        if not _inside(region, box):
            return False
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if _intersection(values[i], values[j]) > _EPS:
                return False
    if need_text:
        block = largest_empty_rect(region, values)
        if block[2] < x - 1e-6 or block[3] < x - 1e-6:
            return False
    return True


def place_unit_designs(
    unit: StoryUnit,
    su_rect: "Rect",
    x: float,
    metrics: GlyphMetrics,
    warnings: list[str] | None = None,
) -> SUBox:
    """Place highlight, icon, chart, and text boxes inside the unit box.

    Raises PlacementError when the unit has body text but no placement leaves
    room for even one glyph row.
    """
    from .blueprint import Rect  # local import; blueprint depends on this module

    sink = warnings if warnings is not None else []
    region: _R = (su_rect.x, su_rect.y, su_rect.w, su_rect.h)

    highlight: _R | None = None
    if unit.all_highlights() and unit.text:
        hl_text = " ".join(span.slice(unit.text) for span in unit.all_highlights())
        hl_w = 2.0 * text_width(hl_text, x, metrics)
        hl_h = 2.0 * x
        # The callout strip may not squeeze the body text below one row.
        height_budget = max(su_rect.h - x, 0.0) if unit.text else su_rect.h
        clipped_w, clipped_h = min(hl_w, su_rect.w), min(hl_h, height_budget)
        if hl_w > clipped_w + 1e-6 or hl_h > clipped_h + 1e-6:
            sink.append(f"highlight clipped for unit {unit.id}")
        highlight = (su_rect.x, su_rect.y, clipped_w, clipped_h)
        inner: _R = (su_rect.x, su_rect.y + clipped_h, su_rect.w, su_rect.h - clipped_h)
    else:
        inner = region

    has_icon = bool(unit.icon_keyword)
    has_chart = unit.chart is not None
    need_text = bool(unit.text)
    present = frozenset(name for name, there in (("icon", has_icon), ("chart", has_chart)) if there)

    if not present:
        text_box = Rect(*inner)
        if need_text and (inner[2] < x - 1e-6 or inner[3] < x - 1e-6):
            raise PlacementError(unit.id, "no room for a single text row")
        return SUBox(
            unit_id=unit.id,
            rect=su_rect,
            highlight_box=Rect(*highlight) if highlight else None,
            text_box=text_box,
            icon_box=None,
            chart_box=None,
            chosen_strategy="text_only",
            chosen_aspect=None,
        )

    # Each design budgets one text-area's worth of space, floored at a 2x
    # square so unit boxes with little text still get a visible icon.
    base_area = max(metrics.ratio_sum(unit.text) * x * x, (2.0 * x) ** 2)

    applicable = [s for s in STRATEGIES if _STRATEGY_SLOTS[s] == present]
    chosen: tuple[str, float, dict[str, _R]] | None = None
    fallback: tuple[float, str, float, dict[str, _R]] | None = None
    for strategy in applicable:
        for aspect in ASPECTS:
            boxes = _evaluate(strategy, aspect, inner, base_area, has_icon, has_chart, scale=1.0)
            if _fits(inner, boxes, need_text, x):
                chosen = (strategy, aspect, boxes)
                break
            metric = _overlap_metric(inner, boxes)
            if fallback is None or metric < fallback[0] - _EPS:
                fallback = (metric, strategy, aspect, boxes)
        if chosen:
            break

    if chosen is None:
        assert fallback is not None
        _, strategy, aspect, _ = fallback
        if not _fits(inner, _evaluate(strategy, aspect, inner, base_area, has_icon, has_chart, 0.0), need_text, x):
            raise PlacementError(unit.id, "no room for a single text row even after shrinking")
        lo, hi = 0.0, 1.0
        for _ in range(_SHRINK_ITERATIONS):
            mid = 0.5 * (lo + hi)
            if _fits(inner, _evaluate(strategy, aspect, inner, base_area, has_icon, has_chart, mid), need_text, x):
                lo = mid
            else:
                hi = mid
            if hi - lo <= _SHRINK_TOL / 4.0:
                break
        boxes = _evaluate(strategy, aspect, inner, base_area, has_icon, has_chart, lo)
        sink.append(f"designs shrunk to {lo:.4f} for unit {unit.id}")
        chosen = (strategy, aspect, boxes)

    strategy, aspect, boxes = chosen
    text_region = largest_empty_rect(inner, list(boxes.values()))
    return SUBox(
        unit_id=unit.id,
        rect=su_rect,
        highlight_box=Rect(*highlight) if highlight else None,
        text_box=Rect(*text_region),
        icon_box=Rect(*boxes["icon"]) if "icon" in boxes else None,
        chart_box=Rect(*boxes["chart"]) if "chart" in boxes else None,
        chosen_strategy=strategy,
        chosen_aspect=aspect,
    )
