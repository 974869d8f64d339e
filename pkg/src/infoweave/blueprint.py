"""Blueprint solving: size the base letter height, then place every box.

The whole infographic's area is written as a function A(x) of the regular
glyph height x (title band 3x tall, subtitles 1.5x, highlights 2x) and
equated to the fixed canvas area W*H. A(x) is a*x^2 + b*x with a >= 0 and
b > 0, so it is strictly increasing and the root is found by bisection on
(0, H/3]. The solved x then drives a top-down geometric partition: title
band, piece cells per layout, subtitle strip plus stacked unit boxes, and
finally per-unit design placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cells import CellAssignment, CellPlan, assign_sp_cells, spiral_enclosed_cells
from .glyphs import GlyphMetrics, default_glyph_metrics
from .model import LayoutKind, StoryFrame, StoryPiece, StoryUnit
from .placement import SUBox, place_unit_designs

# Canvas defaults; the sizing equation fixes the area, callers fix the frame.
DEFAULT_PORTRAIT_CANVAS = (800.0, 1600.0)
DEFAULT_LANDSCAPE_CANVAS = (1600.0, 800.0)

# Below this glyph height text stops being legible; the solver clamps and warns.
MIN_LEGIBLE_X = 6.0

# Pieces wrapped by the spiral curve on three sides shrink by this linear factor.
SPIRAL_SHRINK = 0.8

# Star center: the virtual hub takes one quarter of the total piece content area.
STAR_CENTER_SHARE = 0.25

BISECTION_MAX_ITERATIONS = 200
AREA_RTOL = 1e-6

_EPS_WEIGHT = 1e-9

WARN_UNDER_FILLED = "under-filled canvas"
WARN_OVER_FULL = "over-full canvas"


@dataclass(frozen=True)
class Canvas:
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"canvas must be positive, got {self.width} x {self.height}")

    @property
    def area(self) -> float:
        return self.width * self.height


def default_canvas(layout: LayoutKind) -> Canvas:
    if layout is LayoutKind.LANDSCAPE:
        return Canvas(*DEFAULT_LANDSCAPE_CANVAS)
    return Canvas(*DEFAULT_PORTRAIT_CANVAS)


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def intersection_area(self, other: Rect) -> float:
        dx = min(self.x2, other.x2) - max(self.x, other.x)
        dy = min(self.y2, other.y2) - max(self.y, other.y)
        return dx * dy if dx > 0 and dy > 0 else 0.0

    def contains(self, other: Rect, eps: float = 1e-6) -> bool:
        return (
            other.x >= self.x - eps
            and other.y >= self.y - eps
            and other.x2 <= self.x2 + eps
            and other.y2 <= self.y2 + eps
        )

    def scaled_about_center(self, factor: float) -> Rect:
        w, h = self.w * factor, self.h * factor
        return Rect(self.x + (self.w - w) / 2.0, self.y + (self.h - h) / 2.0, w, h)


@dataclass(frozen=True)
class PieceLayout:
    piece_id: str
    rect: Rect
    subtitle_box: Rect | None
    units: tuple[SUBox, ...]


@dataclass(frozen=True)
class Blueprint:
    layout: LayoutKind
    canvas: Canvas
    x: float
    title_box: Rect
    sp_boxes: tuple[PieceLayout, ...]
    spiral_path: tuple[tuple[float, float], ...] | None
    center_box: Rect | None
    warnings: tuple[str, ...]

    def font_heights(self) -> dict[str, float]:
        return {"title": 3.0 * self.x, "subtitle": 1.5 * self.x, "highlight": 2.0 * self.x, "regular": self.x}

    def piece_layout(self, piece_id: str) -> PieceLayout:
        for sp in self.sp_boxes:
            if sp.piece_id == piece_id:
                return sp
        raise KeyError(piece_id)


class BlueprintError(ValueError):
    pass


@dataclass(frozen=True)
class SolveResult:
    x: float
    warnings: tuple[str, ...]


# --- area model -------------------------------------------------------------


def unit_area_terms(unit: StoryUnit, metrics: GlyphMetrics) -> float:
    """Quadratic coefficient of one unit's area: A_SU(x) = coeff * x^2.

    Highlight text renders at height 2x and twice the base-height width,
    regular text at height x; icon and chart each budget one more text area.
    """
    highlight_text = " ".join(span.slice(unit.text) for span in unit.all_highlights())
    r_highlight = metrics.ratio_sum(highlight_text)
    r_text = metrics.ratio_sum(unit.text)
    designs = 1 + (1 if unit.icon_keyword else 0) + (1 if unit.chart else 0)
    return 4.0 * r_highlight + designs * r_text


def unit_area(unit: StoryUnit, x: float, metrics: GlyphMetrics) -> float:
    return unit_area_terms(unit, metrics) * x * x


def piece_area(piece: StoryPiece, x: float, nominal_width: float, metrics: GlyphMetrics) -> float:
    """A_SP(x): subtitle band (if any) plus the stacked unit areas."""
    area = 1.5 * nominal_width * x if piece.subtitle else 0.0
    return area + sum(unit_area(unit, x, metrics) for unit in piece.units)


def area_coefficients(
    frame: StoryFrame,
    canvas: Canvas,
    layout: LayoutKind,
    metrics: GlyphMetrics | None = None,
) -> tuple[float, float]:
    """(a, b) such that the total area A(x) = a*x^2 + b*x.

    Subtitle terms use each layout's nominal cell width (the plan's share of
    the canvas width) with pieces paired to cells in input order; the star
    layout adds a virtual center piece worth a quarter of the piece content
    area, scaling every piece term by 1.25.
    """
    metrics = metrics or default_glyph_metrics()
    plan = _plan_for(frame, layout)

    a = 0.0
    b_subtitles = 0.0
    for cell_index, piece in enumerate(frame.pieces):
        nominal = plan.nominal_width_fraction(cell_index) * canvas.width
        if piece.subtitle:
            b_subtitles += 1.5 * nominal
        for unit in piece.units:
            a += unit_area_terms(unit, metrics)

    if layout is LayoutKind.STAR:
        a *= 1.0 + STAR_CENTER_SHARE
        b_subtitles *= 1.0 + STAR_CENTER_SHARE

    b = 3.0 * canvas.width + b_subtitles
    return a, b


def _plan_for(frame: StoryFrame, layout: LayoutKind) -> CellPlan:
    from .cells import plan_cells

    return plan_cells(layout, max(1, len(frame.pieces)))


def total_area(
    frame: StoryFrame,
    x: float,
    layout: LayoutKind,
    canvas: Canvas,
    metrics: GlyphMetrics | None = None,
) -> float:
    """Total content area at glyph height x (strictly increasing for x > 0)."""
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    a, b = area_coefficients(frame, canvas, layout, metrics)
    return a * x * x + b * x


def solve_scale(
    frame: StoryFrame,
    canvas: Canvas,
    layout: LayoutKind,
    metrics: GlyphMetrics | None = None,
) -> SolveResult:
    """Solve A(x) = W*H for the base glyph height by bisection on (0, H/3].

    Sparse content that cannot fill the canvas clamps to H/3 (title spans the
    full height budget); content too dense for legible text clamps to the
    minimum glyph height. Both clamps carry a warning and leave the geometry
    to the proportional renormalization downstream.
    """
    metrics = metrics or default_glyph_metrics()
    target = canvas.area
    hi = canvas.height / 3.0

    def area_at(x: float) -> float:
        return total_area(frame, x, layout, canvas, metrics)

    top = area_at(hi)
    if top <= target * (1.0 + 1e-9):
        warnings = (WARN_UNDER_FILLED,) if top < target * (1.0 - 1e-9) else ()
        return SolveResult(x=hi, warnings=warnings)

    lo = 0.0
    for _ in range(BISECTION_MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if area_at(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * canvas.height:
            break
    x = 0.5 * (lo + hi)

    if x < MIN_LEGIBLE_X:
        return SolveResult(x=MIN_LEGIBLE_X, warnings=(WARN_OVER_FULL,))
    return SolveResult(x=x, warnings=())


# --- geometry ---------------------------------------------------------------


def _proportional_slices(start: float, extent: float, weights: list[float]) -> list[tuple[float, float]]:
    """Split [start, start+extent] into len(weights) spans proportional to the
    weights, the last span absorbing the floating-point residue."""
    safe = [max(w, _EPS_WEIGHT) for w in weights]
    total = sum(safe)
    spans: list[tuple[float, float]] = []
    cursor = start
    for i, weight in enumerate(safe):
        if i == len(safe) - 1:
            size = start + extent - cursor
        else:
            size = extent * weight / total
        spans.append((cursor, size))
        cursor += size
    return spans


def _floored_sizes(extent: float, weights: list[float], floors: list[float]) -> list[float]:
    """Proportional split with a minimum size per span (water-filling).

    Spans whose proportional share falls below their floor are pinned to it
    and the rest renormalize over the remaining extent; above the floors the
    split stays proportional. When the extent cannot cover the floors at all,
    the plain proportional split is returned and the caller's fit checks take
    over (that is the genuinely impossible case).
    """
    n = len(weights)
    safe = [max(w, _EPS_WEIGHT) for w in weights]
    if extent < sum(floors):
        total = sum(safe)
        return [extent * w / total for w in safe]
    pinned: set[int] = set()
    while True:
        free = [i for i in range(n) if i not in pinned]
        budget = extent - sum(floors[i] for i in pinned)
        total = sum(safe[i] for i in free)
        sizes = [floors[i] if i in pinned else 0.0 for i in range(n)]
        newly_pinned = False
        for i in free:
            if budget * safe[i] / total < floors[i]:
                pinned.add(i)
                newly_pinned = True
        if not newly_pinned:
            for i in free:
                sizes[i] = budget * safe[i] / total
            return sizes


def _floored_spans(start: float, extent: float, weights: list[float], floors: list[float]) -> list[tuple[float, float]]:
    """Like _proportional_slices but with per-span minimum sizes."""
    sizes = _floored_sizes(extent, weights, floors)
    spans: list[tuple[float, float]] = []
    cursor = start
    for i, size in enumerate(sizes):
        if i == len(sizes) - 1:
            size = start + extent - cursor
        spans.append((cursor, size))
        cursor += size
    return spans


def _piece_floor(piece: StoryPiece, x: float) -> float:
    """Minimum legible height for a piece: subtitle strip plus one text row
    per unit that actually carries text."""
    floor = 1.5 * x if piece.subtitle else 0.0
    floor += x * sum(1 for unit in piece.units if unit.text)
    return floor


def _fill_piece(
    piece: StoryPiece,
    rect: Rect,
    x: float,
    metrics: GlyphMetrics,
    warnings: list[str],
) -> PieceLayout:
    y = rect.y
    subtitle_box = None
    if piece.subtitle:
        subtitle_h = min(1.5 * x, rect.h)
        subtitle_box = Rect(rect.x, y, rect.w, subtitle_h)
        y += subtitle_h

    remaining = rect.y2 - y
    su_boxes: list[SUBox] = []
    if piece.units:
        weights = [unit_area(unit, x, metrics) for unit in piece.units]
        # One glyph row is the minimum legible unit height; shares above it
        # stay proportional and the last unit absorbs the rounding residue.
        floors = [x if unit.text else 0.0 for unit in piece.units]
        for (top, height), unit in zip(_floored_spans(y, remaining, weights, floors), piece.units):
            su_rect = Rect(rect.x, top, rect.w, height)
            su_boxes.append(place_unit_designs(unit, su_rect, x, metrics, warnings=warnings))
    return PieceLayout(piece_id=piece.id, rect=rect, subtitle_box=subtitle_box, units=tuple(su_boxes))


def _piece_weights(
    frame: StoryFrame,
    assignment: CellAssignment,
    x: float,
    canvas: Canvas,
    metrics: GlyphMetrics,
) -> dict[str, float]:
    weights = {}
    for cell_index, piece_id in enumerate(assignment.order):
        piece = frame.piece_by_id(piece_id)
        nominal = assignment.plan.nominal_width_fraction(cell_index) * canvas.width
        weights[piece_id] = piece_area(piece, x, nominal, metrics)
    return weights


def _grid_like_rects(
    plan: CellPlan,
    content: Rect,
    weights_by_cell: list[float],
    floors_by_cell: list[float],
    x: float,
) -> list[Rect]:
    """Row heights proportional to row area sums; cell widths proportional
    within each row. Covers grid, spiral, portrait, and portrait-grid plans.
    Row heights respect the tallest legibility floor in the row; cell widths
    keep one glyph row's width as their floor."""
    rects: list[Rect] = [Rect(0, 0, 0, 0)] * plan.n
    row_weights = [sum(weights_by_cell[cell] for cell in row) for row in plan.rows]
    row_floors = [max(floors_by_cell[cell] for cell in row) for row in plan.rows]
    for (row_top, row_h), row in zip(_floored_spans(content.y, content.h, row_weights, row_floors), plan.rows):
        cell_weights = [weights_by_cell[cell] for cell in row]
        cell_floors = [min(x, content.w / len(row))] * len(row)
        for (cell_left, cell_w), cell in zip(_floored_spans(content.x, content.w, cell_weights, cell_floors), row):
            rects[cell] = Rect(cell_left, row_top, cell_w, row_h)
    return rects


def _landscape_rects(
    plan: CellPlan, content: Rect, weights_by_cell: list[float], x: float
) -> list[Rect]:
    rects: list[Rect] = []
    floors = [min(x, content.w / plan.n)] * plan.n
    for (left, width), _ in zip(_floored_spans(content.x, content.w, weights_by_cell, floors), range(plan.n)):
        rects.append(Rect(left, content.y, width, content.h))
    return rects


def _star_geometry(
    plan: CellPlan,
    content: Rect,
    weights_by_cell: list[float],
    floors_by_cell: list[float],
    x: float,
) -> tuple[list[Rect], Rect]:
    """Partition the content region into a center box (one fifth of the
    content area, i.e. a quarter of what the pieces keep) and a clockwise
    ring of cells: top band, right band, bottom band, left band."""
    bands = plan.star_bands or ((), (), (), ())
    top_cells, right_cells, bottom_cells, left_cells = bands
    center_area = content.area / 5.0

    if not right_cells and not left_cells:
        wc, hc = content.w, center_area / content.w if content.w > 0 else 0.0
    else:
        wc, hc = content.w / math.sqrt(5.0), content.h / math.sqrt(5.0)

    def band_weight(cells: tuple[int, ...]) -> float:
        return sum(max(weights_by_cell[c], _EPS_WEIGHT) for c in cells)

    def band_floor(cells: tuple[int, ...]) -> float:
        return max((floors_by_cell[c] for c in cells), default=0.0)

    # Vertical split: top band, middle (center-height) band, bottom band.
    side_h = content.h - hc
    if not top_cells and not bottom_cells:
        ht = hb = side_h / 2.0
    elif not bottom_cells:
        ht, hb = side_h, 0.0
    elif not top_cells:
        ht, hb = 0.0, side_h
    else:
        ht, hb = _floored_sizes(
            side_h,
            [band_weight(top_cells), band_weight(bottom_cells)],
            [band_floor(top_cells), band_floor(bottom_cells)],
        )

    # Horizontal split of the middle band: left cells, center, right cells.
    side_w = content.w - wc
    if not left_cells and not right_cells:
        wl = 0.0
    elif not left_cells:
        wl = 0.0
    elif not right_cells:
        wl = side_w
    else:
        wl, _ = _floored_sizes(
            side_w,
            [band_weight(left_cells), band_weight(right_cells)],
            [min(x, side_w / 2.0)] * 2,
        )

    rects: list[Rect] = [Rect(0, 0, 0, 0)] * plan.n
    middle_y = content.y + ht

    def width_floors(cells: tuple[int, ...], extent: float) -> list[float]:
        return [min(x, extent / len(cells))] * len(cells)

    def height_floors(cells: tuple[int, ...], extent: float) -> list[float]:
        return [min(floors_by_cell[c], extent / len(cells)) for c in cells]

    if top_cells:
        weights = [weights_by_cell[c] for c in top_cells]
        spans = _floored_spans(content.x, content.w, weights, width_floors(top_cells, content.w))
        for (left, width), cell in zip(spans, top_cells):
            rects[cell] = Rect(left, content.y, width, ht)
    if right_cells:
        weights = [weights_by_cell[c] for c in right_cells]
        right_x = content.x + wl + wc
        spans = _floored_spans(middle_y, hc, weights, height_floors(right_cells, hc))
        for (top, height), cell in zip(spans, right_cells):
            rects[cell] = Rect(right_x, top, content.x2 - right_x, height)
    if bottom_cells:
        # Clockwise means the bottom band reads right to left.
        ordered = tuple(reversed(bottom_cells))
        weights = [weights_by_cell[c] for c in ordered]
        bottom_y = middle_y + hc
        spans = _floored_spans(content.x, content.w, weights, width_floors(ordered, content.w))
        for (left, width), cell in zip(spans, ordered):
            rects[cell] = Rect(left, bottom_y, width, content.y2 - bottom_y)
    if left_cells:
        # Clockwise means the left band reads bottom to top.
        ordered = tuple(reversed(left_cells))
        weights = [weights_by_cell[c] for c in ordered]
        spans = _floored_spans(middle_y, hc, weights, height_floors(ordered, hc))
        for (top, height), cell in zip(spans, ordered):
            rects[cell] = Rect(content.x, top, wl, height)

    center = Rect(content.x + wl, middle_y, wc, hc)
    return rects, center


def _spiral_path_points(plan: CellPlan, content: Rect, cell_rects: list[Rect]) -> tuple[tuple[float, float], ...]:
    """Serpentine polyline along the row-band boundaries, alternating direction."""
    points: list[tuple[float, float]] = []
    row_tops: list[float] = []
    cursor = content.y
    for row in plan.rows:
        row_tops.append(cursor)
        cursor = max(cell_rects[cell].y2 for cell in row) if row else cursor
    for r, top in enumerate(row_tops):
        if r % 2 == 0:
            points.extend([(content.x, top), (content.x2, top)])
        else:
            points.extend([(content.x2, top), (content.x, top)])
    return tuple(points)


def build_blueprint(
    frame: StoryFrame,
    canvas: Canvas,
    layout: LayoutKind,
    x: float,
    assignment: CellAssignment | None = None,
    metrics: GlyphMetrics | None = None,
    solve_warnings: tuple[str, ...] = (),
) -> Blueprint:
    """Place every box for the chosen layout at the solved glyph height.

    Piece cells are sized proportionally to their content areas and
    renormalized to cover the canvas exactly; unit boxes stack vertically
    inside each piece under its subtitle.
    """
    metrics = metrics or default_glyph_metrics()
    if assignment is None:
        assignment = assign_sp_cells(frame, layout)
    if set(assignment.order) != {piece.id for piece in frame.pieces}:
        raise BlueprintError("assignment does not cover the frame's pieces")

    warnings: list[str] = list(solve_warnings)
    title_h = min(3.0 * x, canvas.height)
    title_box = Rect(0.0, 0.0, canvas.width, title_h)
    content = Rect(0.0, title_h, canvas.width, canvas.height - title_h)

    weights = _piece_weights(frame, assignment, x, canvas, metrics)
    weights_by_cell = [weights[piece_id] for piece_id in assignment.order]
    floors_by_cell = [_piece_floor(frame.piece_by_id(piece_id), x) for piece_id in assignment.order]

    center_box: Rect | None = None
    spiral_path: tuple[tuple[float, float], ...] | None = None
    plan = assignment.plan

    if layout is LayoutKind.LANDSCAPE:
        cell_rects = _landscape_rects(plan, content, weights_by_cell, x)
    elif layout is LayoutKind.STAR:
        cell_rects, center_box = _star_geometry(plan, content, weights_by_cell, floors_by_cell, x)
    else:
        cell_rects = _grid_like_rects(plan, content, weights_by_cell, floors_by_cell, x)

    piece_rects = dict(zip(assignment.order, cell_rects))
    if layout is LayoutKind.SPIRAL:
        spiral_path = _spiral_path_points(plan, content, cell_rects)
        for cell in spiral_enclosed_cells(plan):
            piece_id = assignment.order[cell]
            piece_rects[piece_id] = piece_rects[piece_id].scaled_about_center(SPIRAL_SHRINK)

    sp_boxes = []
    for piece_id in assignment.order:
        piece = frame.piece_by_id(piece_id)
        sp_boxes.append(_fill_piece(piece, piece_rects[piece_id], x, metrics, warnings))

    return Blueprint(
        layout=layout,
        canvas=canvas,
        x=x,
        title_box=title_box,
        sp_boxes=tuple(sp_boxes),
        spiral_path=spiral_path,
        center_box=center_box,
        warnings=tuple(warnings),
    )


def make_blueprint(
    frame: StoryFrame,
    layout: LayoutKind,
    canvas: Canvas | None = None,
    metrics: GlyphMetrics | None = None,
) -> Blueprint:
    """Solve, assign, and build in one step with the layout's default canvas."""
    canvas = canvas or default_canvas(layout)
    metrics = metrics or default_glyph_metrics()
    solved = solve_scale(frame, canvas, layout, metrics)
    assignment = assign_sp_cells(frame, layout)
    return build_blueprint(
        frame,
        canvas,
        layout,
        solved.x,
        assignment=assignment,
        metrics=metrics,
        solve_warnings=solved.warnings,
    )
