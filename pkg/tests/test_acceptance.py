"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances and time budgets are pinned here, not configurable.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
import xml.etree.ElementTree as ET

from fastapi.testclient import TestClient

from conftest import TITANIC_GOAL, DATA_DIR, make_frame, make_piece, make_unit, random_frame
from test_blueprint_geometry import check_geometry
from test_placement import fuzz_rect, fuzz_unit, oracle_place
from test_recommend import _random_metrics, oracle_scores
from test_solver import oracle_closed_form_root

from infoweave.blueprint import MIN_LEGIBLE_X, Canvas, make_blueprint, solve_scale, total_area
from infoweave.cells import assign_sp_cells, count_adjacent_related, spiral_cell_order, stable_topological_order
from infoweave.charts import map_insight_to_chart, parse_numbers
from infoweave.cli import EXIT_OK, main
from infoweave.docio import frame_from_dict
from infoweave.glyphs import default_glyph_metrics
from infoweave.model import (
    ChartKind,
    DataInsightKind,
    LayoutKind,
    NarrativeRelationKind,
    StoryMetrics,
    compute_metrics,
    validate_chart,
    validate_frame,
)
from infoweave.placement import PlacementError, place_unit_designs
from infoweave.providers import MockProvider, ProviderConfig
from infoweave.recommend import score_layouts
from infoweave.service import ServiceSettings, create_app

NS = {"s": "http://www.w3.org/2000/svg"}
ALL_LAYOUTS = list(LayoutKind)
METRICS = default_glyph_metrics()


def _report(number: int, description: str, started: float) -> None:
    print(f"PASS criterion {number}: {description} ({time.monotonic() - started:.2f}s)")


def test_criterion_01_example_rule_fidelity_on_boundary_grid():
    started = time.monotonic()
    budget = 1.0
    grid = itertools.product((8, 9), (0.29, 0.3, 0.6, 0.61), (0.8, 0.81), (3, 4), (2, 3))
    points = 0
    for n_sp, rho_su, rho_rel, diversity, max_ref in grid:
        kinds = list(NarrativeRelationKind)[:diversity]
        metrics = StoryMetrics(
            n_sp=n_sp,
            n_su=max(n_sp, 1),
            rho_su=rho_su,
            rho_rel=rho_rel,
            relation_counts={k: 1 for k in kinds},
            goal_relation_counts={},
            ref=tuple([max_ref] + [0] * (n_sp - 1)),
        )
        ranking = score_layouts(metrics)

        def fired(rule_id: str, layout: LayoutKind) -> bool:
            return any(f.rule_id == rule_id and f.layout is layout for f in ranking.firings)

        assert fired("sp_gt8", LayoutKind.GRID) == (n_sp > 8)
        assert fired("su_03to06", LayoutKind.STAR) == (0.3 <= rho_su <= 0.6)
        assert fired("rel_gt08", LayoutKind.SPIRAL) == (rho_rel > 0.8)
        assert fired("logic_div_gt3", LayoutKind.PORTRAIT) == (diversity > 3)
        assert fired("ref_gt2", LayoutKind.PORTRAIT_GRID) == (max_ref > 2)
        points += 1
    elapsed = time.monotonic() - started
    assert elapsed < budget
    assert points == 64
    _report(1, f"five published rules exact on all {points} boundary points", started)


def test_criterion_02_scoring_matches_independent_interpreter():
    started = time.monotonic()
    budget = 5.0
    rng = random.Random(20240601)
    for _ in range(1000):
        metrics = _random_metrics(rng)
        assert score_layouts(metrics).scores == oracle_scores(metrics)
    elapsed = time.monotonic() - started
    assert elapsed < budget
    _report(2, "1000 random metrics score identically to the oracle interpreter", started)


def test_criterion_03_solver_matches_closed_form():
    started = time.monotonic()
    budget = 10.0
    rng = random.Random(73331)
    checked = 0
    while checked < 200:
        frame = random_frame(rng, max_pieces=8)
        layout = ALL_LAYOUTS[checked % 6]
        canvas = Canvas(800.0, 1600.0) if layout is not LayoutKind.LANDSCAPE else Canvas(1600.0, 800.0)
        root = oracle_closed_form_root(frame, layout, canvas)
        if not (MIN_LEGIBLE_X <= root < canvas.height / 3.0):
            continue
        solved = solve_scale(frame, canvas, layout)
        assert solved.warnings == ()
        assert abs(solved.x - root) / root <= 1e-6
        residual = abs(total_area(frame, solved.x, layout, canvas) - canvas.area) / canvas.area
        assert residual <= 1e-6
        checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < budget
    _report(3, "bisection equals the quadratic root (1e-6) on 200 frames", started)


def test_criterion_04_degenerate_title_only_solve():
    started = time.monotonic()
    frame = make_frame([make_piece("sp-1", subtitle="", units=(make_unit("u1", text=""),))])
    canvas = Canvas(800.0, 1600.0)
    solved = solve_scale(frame, canvas, LayoutKind.PORTRAIT)
    assert solved.x == canvas.height / 3.0
    _report(4, "title-only frame solves to exactly H/3", started)


def test_criterion_05_blueprint_geometry_on_fuzzed_frames():
    started = time.monotonic()
    budget = 30.0
    rng = random.Random(55055)
    for i in range(200):
        frame = random_frame(rng)
        layout = ALL_LAYOUTS[i % 6]
        blueprint = make_blueprint(frame, layout)
        problems = check_geometry(blueprint)
        assert problems == [], f"{layout.value}: {problems[:3]}"
        x = blueprint.x
        assert blueprint.font_heights() == {"title": 3.0 * x, "subtitle": 1.5 * x, "highlight": 2.0 * x, "regular": x}
    elapsed = time.monotonic() - started
    assert elapsed < budget
    _report(5, "200 fuzzed blueprints: zero overlap, full nesting, exact font set", started)


def test_criterion_06_star_center_area_constraint():
    started = time.monotonic()
    rng = random.Random(66066)
    for _ in range(50):
        frame = random_frame(rng)
        blueprint = make_blueprint(frame, LayoutKind.STAR)
        placed = sum(sp.rect.area for sp in blueprint.sp_boxes)
        assert blueprint.center_box is not None
        assert abs(blueprint.center_box.area - placed / 4.0) / (placed / 4.0) <= 1e-6
    _report(6, "star center equals a quarter of the piece areas (1e-6) on 50 blueprints", started)


def test_criterion_07_adjacency_guarantee_and_optimum_bound():
    started = time.monotonic()
    budget = 20.0
    rng = random.Random(77077)
    checked = 0
    for i in range(150):
        frame = random_frame(rng, n_pieces=rng.randint(2, 6), relation_rate=0.9)
        layout = ALL_LAYOUTS[i % 6]
        assignment = assign_sp_cells(frame, layout)
        adjacency = assignment.plan.adjacency()
        related = {frozenset((r.from_id, r.to_id)) for r in frame.relations if r.from_id != r.to_id}
        ids = tuple(p.id for p in frame.pieces)

        if layout is LayoutKind.SPIRAL:
            # The spiral's baseline is its narrative (temporal) reorder laid
            # along the curve; the guarantee is relative to that order.
            constraints = [
                (r.from_id, r.to_id)
                for r in frame.relations
                if r.kind is NarrativeRelationKind.TEMPORAL and r.from_id != r.to_id
            ]
            narrative = stable_topological_order(ids, constraints)
            curve = spiral_cell_order(assignment.plan)
            baseline_cells = [""] * len(ids)
            for position, pid in enumerate(narrative):
                baseline_cells[curve[position]] = pid
            baseline = tuple(baseline_cells)
        else:
            baseline = ids

        base_score = count_adjacent_related(baseline, adjacency, related)
        optimum = max(count_adjacent_related(perm, adjacency, related) for perm in itertools.permutations(ids))
        assert base_score <= assignment.adjacent_related <= optimum
        checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < budget
    assert checked == 150
    _report(7, "greedy adjacency between the baseline and the exhaustive optimum on 150 frames", started)


def test_criterion_08_placement_matches_exhaustive_enumeration():
    started = time.monotonic()
    rng = random.Random(88088)
    compared = 0
    while compared < 100:
        x = rng.uniform(6.0, 20.0)
        unit = fuzz_unit(rng, f"u{compared}")
        rect = fuzz_rect(rng, x)
        expected = oracle_place(unit, rect, x)
        try:
            box = place_unit_designs(unit, rect, x, METRICS)
        except PlacementError:
            continue
        strategy, aspect, scale, boxes = expected
        assert box.chosen_strategy == strategy
        if aspect is not None:
            assert box.chosen_aspect == aspect
        for name in ("icon", "chart"):
            got = getattr(box, f"{name}_box")
            if name in boxes:
                if scale == 1.0:
                    ox, oy, ow, oh = boxes[name]
                    assert (abs(got.x - ox) + abs(got.y - oy) + abs(got.w - ow) + abs(got.h - oh)) < 1e-8
                else:
                    full = math.sqrt(max(METRICS.ratio_sum(unit.text) * x * x, (2.0 * x) ** 2) * aspect)
                    assert abs(got.w / full - scale) <= 1e-3
            else:
                assert got is None
        compared += 1
    _report(8, "placement equals exhaustive strategy/aspect search on 100 units (shrink within 1e-3)", started)


def test_criterion_09_chart_rule_table():
    started = time.monotonic()
    bar = map_insight_to_chart(DataInsightKind.DIFFERENCE, parse_numbers("339 women survived out of 466 on board"))
    assert bar.kind is ChartKind.BAR
    assert [v for _, v in bar.series] == [339.0, 466.0]

    single = map_insight_to_chart(DataInsightKind.PROPORTION, parse_numbers("61.9% of first class survived"))
    assert single.kind is ChartKind.SINGLE_PIE and single.single_value == 61.9

    pictograph = map_insight_to_chart(DataInsightKind.PROPORTION, parse_numbers("about 1 in 10 were children"))
    assert pictograph.kind is ChartKind.PICTOGRAPH and pictograph.fraction == (1, 10)

    two_points = parse_numbers("in 2001 exports reached 120 and in 2002 they reached 150")
    assert len(two_points.time_points) == 2
    assert map_insight_to_chart(DataInsightKind.TREND, two_points) is None

    from test_charts import _random_parse
    from infoweave.charts import NumericParse

    rng = random.Random(99099)
    for _ in range(500):
        raw = _random_parse(rng)
        parse = NumericParse(
            percentages=raw.percentages,
            out_of_pairs=raw.out_of_pairs,
            out_of_labels=tuple(("part", "whole") for _ in raw.out_of_pairs),
            fractions=raw.fractions,
            bare_values=raw.bare_values,
            time_points=raw.time_points,
        )
        for insight in DataInsightKind:
            chart = map_insight_to_chart(insight, parse)
            assert chart is None or validate_chart(chart) == []
    _report(9, "four published chart mappings exact; fuzzed mappings valid-or-none", started)


def test_criterion_10_cap_constraints_rejected_with_named_violations():
    started = time.monotonic()
    eleven = make_frame([make_piece(f"sp-{i}", units=(make_unit(f"u{i}"),)) for i in range(11)])
    rules = {v.rule for v in validate_frame(eleven)}
    assert "pieces > 10" in rules

    five_units = make_frame([make_piece("sp-1", units=tuple(make_unit(f"u{i}") for i in range(5)))])
    rules = {v.rule for v in validate_frame(five_units)}
    assert "units > 4" in rules
    _report(10, "11-piece and 5-unit frames rejected with named violations", started)


def test_criterion_11_end_to_end_determinism(tmp_path, capsys):
    started = time.monotonic()
    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        code = main(
            [
                "pipeline",
                str(DATA_DIR / "titanic.txt"),
                "--goal",
                TITANIC_GOAL,
                "--provider",
                "mock",
                "--seed",
                "7",
                "--layout",
                "portrait",
                "--out-dir",
                str(out),
            ]
        )
        assert code == EXIT_OK
        outputs.append(
            {name: (out / name).read_bytes() for name in ("storyframe.json", "ranking.json", "blueprint.json", "infographic.svg")}
        )
    assert outputs[0] == outputs[1]

    svg = outputs[0]["infographic.svg"].decode("utf-8")
    root = ET.fromstring(svg)

    frame_doc = json.loads(outputs[0]["storyframe.json"])
    frame = frame_from_dict(frame_doc)
    gender_unit = next(
        unit for piece in frame.pieces for unit in piece.units if "339 women survived" in unit.text
    )
    chart_group = root.find(f".//s:g[@id='sf-{gender_unit.id}-chart']", NS)
    assert chart_group is not None
    bars = chart_group.findall(".//s:rect[@class='bar']", NS)
    values = [b.get("data-value") for b in bars]
    assert values == ["339", "466"]  # exact ratio via verbatim values
    heights = [float(b.get("height")) for b in bars]
    assert abs(heights[0] / heights[1] - 339.0 / 466.0) / (339.0 / 466.0) <= 1e-6
    _report(11, "pipeline outputs byte-identical across runs; gender bars encode 339:466", started)


def test_criterion_12_service_equivalence(tmp_path, titanic_text):
    started = time.monotonic()
    settings = ServiceSettings(data_dir=tmp_path / "data", provider_config=ProviderConfig(kind="mock", seed=7))
    provider = MockProvider(ProviderConfig(kind="mock", seed=7))

    from infoweave.blueprint import default_canvas
    from infoweave.docio import blueprint_to_dict, frame_to_dict, ranking_to_dict
    from infoweave.pipeline import build_frame, collect_icons
    from infoweave.render import render

    with TestClient(create_app(settings)) as client:
        created = client.post("/projects", json={"source_text": titanic_text, "goal": TITANIC_GOAL, "seed": 7})
        assert created.status_code == 201
        project = created.json()

        direct_frame = build_frame(titanic_text, TITANIC_GOAL, provider, seed=7)
        assert project["storyframe"] == frame_to_dict(direct_frame)

        got = client.get(f"/projects/{project['id']}/storyframe").json()
        assert got == {"revision": 1, "storyframe": frame_to_dict(direct_frame)}

        ranking = client.get(f"/projects/{project['id']}/layouts").json()["ranking"]
        assert ranking == ranking_to_dict(score_layouts(compute_metrics(direct_frame)))

        built = client.post(f"/projects/{project['id']}/blueprint", json={"layout": "portrait"}).json()
        direct_blueprint = make_blueprint(direct_frame, LayoutKind.PORTRAIT, canvas=default_canvas(LayoutKind.PORTRAIT))
        assert built["blueprint"] == blueprint_to_dict(direct_blueprint, [])
        assert built["revision"] == 2

        rendered = client.get(f"/projects/{project['id']}/render.svg")
        assets = collect_icons(direct_frame, provider)
        direct_svg = render(direct_frame, direct_blueprint, direct_frame.stylization, assets, overrides=[])
        assert rendered.text == direct_svg

        stale = client.put(
            f"/projects/{project['id']}/storyframe",
            json={"revision": 1, "storyframe": project["storyframe"]},
        )
        assert stale.status_code == 409  # blueprint build bumped to 2
        assert stale.json()["error"]["code"] == "stale_revision"
        fresh = client.put(
            f"/projects/{project['id']}/storyframe",
            json={"revision": 2, "storyframe": project["storyframe"]},
        )
        assert fresh.status_code == 200 and fresh.json()["revision"] == 3
    _report(12, "every endpoint equals the direct library call, conflicts included", started)
