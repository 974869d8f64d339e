"""Built blueprints: overlap, nesting, fonts, star center, spiral shrink,
checked with an exhaustive rectangle-intersection oracle."""

from __future__ import annotations

import random

import pytest

from conftest import make_frame, make_piece, make_unit, random_frame
from infoweave.blueprint import SPIRAL_SHRINK, Blueprint, Canvas, Rect, make_blueprint, solve_scale
from infoweave.cells import plan_cells, spiral_enclosed_cells
from infoweave.glyphs import default_glyph_metrics
from infoweave.model import LayoutKind

ALL_LAYOUTS = list(LayoutKind)
METRICS = default_glyph_metrics()

AREA_TOL = 1e-6  # px^2 of allowed sibling intersection
NEST_EPS = 1e-6  # px of allowed containment slack


def check_geometry(blueprint: Blueprint) -> list[str]:
    """Exhaustive O(n^2) intersection and containment scan; returns problems."""
    problems: list[str] = []
    canvas_rect = Rect(0, 0, blueprint.canvas.width, blueprint.canvas.height)

    if not canvas_rect.contains(blueprint.title_box, NEST_EPS):
        problems.append("title escapes the canvas")

    siblings = [(sp.piece_id, sp.rect) for sp in blueprint.sp_boxes]
    if blueprint.center_box is not None:
        siblings.append(("star-center", blueprint.center_box))
    for i in range(len(siblings)):
        for j in range(i + 1, len(siblings)):
            overlap = siblings[i][1].intersection_area(siblings[j][1])
            if overlap > AREA_TOL:
                problems.append(f"{siblings[i][0]} overlaps {siblings[j][0]} by {overlap}")

    for sp in blueprint.sp_boxes:
        if not canvas_rect.contains(sp.rect, NEST_EPS):
            problems.append(f"{sp.piece_id} escapes the canvas")
        if sp.rect.intersection_area(blueprint.title_box) > AREA_TOL:
            problems.append(f"{sp.piece_id} overlaps the title")
        if sp.subtitle_box is not None and not sp.rect.contains(sp.subtitle_box, NEST_EPS):
            problems.append(f"{sp.piece_id} subtitle escapes its piece")
        for su in sp.units:
            if not sp.rect.contains(su.rect, NEST_EPS):
                problems.append(f"{su.unit_id} escapes {sp.piece_id}")
            for name, box in (
                ("highlight", su.highlight_box),
                ("text", su.text_box),
                ("icon", su.icon_box),
                ("chart", su.chart_box),
            ):
                if box is not None and not su.rect.contains(box, NEST_EPS):
                    problems.append(f"{su.unit_id} {name} box escapes its unit")
        for a in range(len(sp.units)):
            for b in range(a + 1, len(sp.units)):
                overlap = sp.units[a].rect.intersection_area(sp.units[b].rect)
                if overlap > AREA_TOL:
                    problems.append(f"units {sp.units[a].unit_id} and {sp.units[b].unit_id} overlap by {overlap}")
    return problems


def buildable_frame(rng: random.Random, **kwargs):
    return random_frame(rng, **kwargs)


class TestGeometryInvariants:
    def test_fuzzed_blueprints_have_clean_geometry(self):
        rng = random.Random(808)
        built = 0
        for i in range(60):
            frame = buildable_frame(rng)
            layout = ALL_LAYOUTS[i % len(ALL_LAYOUTS)]
            blueprint = make_blueprint(frame, layout)
            problems = check_geometry(blueprint)
            assert problems == [], f"layout {layout}: {problems[:4]}"
            built += 1
        assert built == 60

    def test_font_heights_are_exact_multiples(self):
        rng = random.Random(4242)
        for layout in ALL_LAYOUTS:
            frame = buildable_frame(rng, n_pieces=4)
            blueprint = make_blueprint(frame, layout)
            fonts = blueprint.font_heights()
            x = blueprint.x
            assert fonts == {"title": 3.0 * x, "subtitle": 1.5 * x, "highlight": 2.0 * x, "regular": x}

    def test_determinism(self):
        rng = random.Random(11)
        frame = buildable_frame(rng, n_pieces=5)
        for layout in ALL_LAYOUTS:
            assert make_blueprint(frame, layout) == make_blueprint(frame, layout)

    def test_title_spans_full_width(self):
        frame = buildable_frame(random.Random(3), n_pieces=2)
        blueprint = make_blueprint(frame, LayoutKind.GRID)
        assert blueprint.title_box.x == 0.0
        assert blueprint.title_box.w == blueprint.canvas.width
        assert blueprint.title_box.h == pytest.approx(3.0 * blueprint.x)


class TestProportions:
    def test_portrait_rows_scale_with_piece_areas(self):
        # One piece with twice the unit text of the other: rows split 2:1.
        light = "harbor " * 10
        pieces = [
            make_piece("sp-1", subtitle="", units=(make_unit("u1", text=(light * 2).strip()),)),
            make_piece("sp-2", subtitle="", units=(make_unit("u2", text=light.strip()),)),
        ]
        frame = make_frame(pieces)
        blueprint = make_blueprint(frame, LayoutKind.PORTRAIT)
        h1 = blueprint.sp_boxes[0].rect.h
        h2 = blueprint.sp_boxes[1].rect.h
        r1 = METRICS.ratio_sum((light * 2).strip())
        r2 = METRICS.ratio_sum(light.strip())
        assert h1 / h2 == pytest.approx(r1 / r2, rel=1e-9)

    def test_rows_fill_content_exactly(self):
        rng = random.Random(21)
        for layout in (LayoutKind.PORTRAIT, LayoutKind.GRID, LayoutKind.PORTRAIT_GRID):
            frame = buildable_frame(rng, n_pieces=5)
            blueprint = make_blueprint(frame, layout)
            bottom = max(sp.rect.y2 for sp in blueprint.sp_boxes)
            assert bottom == pytest.approx(blueprint.canvas.height, abs=1e-6)

    def test_landscape_columns_fill_width(self):
        frame = buildable_frame(random.Random(22), n_pieces=4)
        blueprint = make_blueprint(frame, LayoutKind.LANDSCAPE)
        right = max(sp.rect.x2 for sp in blueprint.sp_boxes)
        assert right == pytest.approx(blueprint.canvas.width, abs=1e-6)


class TestUnitStacking:
    def test_unit_heights_scale_with_their_areas(self):
        # Two units with 2:1 text inside one piece: boxes split 2:1 once both
        # clear the one-row floor.
        light = ("cargo moved through the winter season " * 4).strip()
        piece = make_piece(
            "sp-1",
            subtitle="",
            units=(
                make_unit("u-long", text=(light + " " + light)),
                make_unit("u-short", text=light),
            ),
        )
        frame = make_frame([piece])
        blueprint = make_blueprint(frame, LayoutKind.PORTRAIT)
        units = blueprint.sp_boxes[0].units
        r_long = METRICS.ratio_sum(light + " " + light)
        r_short = METRICS.ratio_sum(light)
        assert units[0].rect.h / units[1].rect.h == pytest.approx(r_long / r_short, rel=1e-9)

    def test_clamp_warnings_land_in_the_blueprint(self):
        pieces = [
            make_piece(
                f"sp-{p}",
                units=tuple(make_unit(f"sp-{p}-u{i}", text="dense harbor ledger entry " * 80) for i in range(4)),
            )
            for p in range(10)
        ]
        blueprint = make_blueprint(make_frame(pieces), LayoutKind.PORTRAIT, canvas=Canvas(400, 400))
        assert "over-full canvas" in blueprint.warnings


class TestStar:
    def test_ring_bands_sit_on_their_sides(self):
        rng = random.Random(35)
        frame = buildable_frame(rng, n_pieces=8)  # quotas 2/2/2/2
        blueprint = make_blueprint(frame, LayoutKind.STAR)
        content_top = blueprint.title_box.y2
        rects = [sp.rect for sp in blueprint.sp_boxes]
        top_band, right_band = rects[0:2], rects[2:4]
        bottom_band, left_band = rects[4:6], rects[6:8]
        for rect in top_band:
            assert rect.y == pytest.approx(content_top)
        for rect in right_band:
            assert rect.x2 == pytest.approx(blueprint.canvas.width)
        for rect in bottom_band:
            assert rect.y2 == pytest.approx(blueprint.canvas.height)
        for rect in left_band:
            assert rect.x == pytest.approx(0.0)
        # Clockwise reading: bottom band right-to-left, left band bottom-to-top.
        assert bottom_band[0].x > bottom_band[1].x
        assert left_band[0].y > left_band[1].y

    def test_center_box_is_quarter_of_piece_areas(self):
        rng = random.Random(31)
        for _ in range(20):
            frame = buildable_frame(rng, n_pieces=rng.randint(1, 10))
            blueprint = make_blueprint(frame, LayoutKind.STAR)
            assert blueprint.center_box is not None
            placed = sum(sp.rect.area for sp in blueprint.sp_boxes)
            assert blueprint.center_box.area == pytest.approx(placed / 4.0, rel=1e-6)

    def test_star_equal_pieces(self):
        text = "steady winter traffic along the harbor"
        pieces = [
            make_piece(f"sp-{i}", subtitle="", units=(make_unit(f"sp-{i}-u", text=text),)) for i in range(4)
        ]
        frame = make_frame(pieces)
        blueprint = make_blueprint(frame, LayoutKind.STAR)
        placed = sum(sp.rect.area for sp in blueprint.sp_boxes)
        assert blueprint.center_box.area == pytest.approx(placed / 4.0, rel=1e-6)
        assert check_geometry(blueprint) == []


class TestSpiral:
    def test_enclosed_cells_shrink(self):
        rng = random.Random(41)
        frame = buildable_frame(rng, n_pieces=6)
        layout = LayoutKind.SPIRAL
        blueprint = make_blueprint(frame, layout)
        plan = plan_cells(layout, 6)
        solved = solve_scale(frame, blueprint.canvas, layout)

        # Rebuild the unshrunk cell extents: enclosed cells should cover
        # SPIRAL_SHRINK^2 of their cell area; others cover it fully.
        enclosed = spiral_enclosed_cells(plan)
        sp_by_id = {sp.piece_id: sp for sp in blueprint.sp_boxes}
        # Cells tile the content region; reconstruct areas from neighbors.
        total_cell_area = blueprint.canvas.width * (blueprint.canvas.height - 3.0 * solved.x)
        cell_area_sum = 0.0
        for index, sp in enumerate(blueprint.sp_boxes):
            if index in enclosed:
                cell_area_sum += sp.rect.area / (SPIRAL_SHRINK * SPIRAL_SHRINK)
            else:
                cell_area_sum += sp.rect.area
        assert cell_area_sum == pytest.approx(total_cell_area, rel=1e-9)

    def test_spiral_path_runs_span_the_content(self):
        frame = buildable_frame(random.Random(43), n_pieces=5)
        blueprint = make_blueprint(frame, LayoutKind.SPIRAL)
        assert blueprint.spiral_path is not None
        xs = {p[0] for p in blueprint.spiral_path}
        assert min(xs) == 0.0
        assert max(xs) == blueprint.canvas.width
        rows = plan_cells(LayoutKind.SPIRAL, 5).rows
        assert len(blueprint.spiral_path) == 2 * len(rows)

    def test_non_spiral_has_no_path(self):
        frame = buildable_frame(random.Random(44), n_pieces=3)
        assert make_blueprint(frame, LayoutKind.GRID).spiral_path is None
