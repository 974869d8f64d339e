"""Canonical document formats for frames, rankings, and blueprints.

All documents are JSON with a fixed key order and a required schema_version,
so equal values serialize to byte-identical text. Parsing is strict: unknown
keys, missing keys, and version mismatches are reported with a JSON-path
location instead of being repaired silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .blueprint import Blueprint, Canvas, PieceLayout, Rect
from .model import (
    ChartKind,
    ChartSpec,
    LayoutKind,
    PieceRelation,
    StoryFrame,
    StoryMetrics,
    StoryPiece,
    StoryUnit,
    Stylization,
    TextSpan,
    parse_insight_kind,
    parse_layout_kind,
    parse_relation_kind,
)
from .placement import SUBox
from .recommend import LayoutRanking, RuleFiring

FRAME_SCHEMA = "storyframe/1"
RANKING_SCHEMA = "ranking/1"
BLUEPRINT_SCHEMA = "blueprint/1"
METRICS_SCHEMA = "metrics/1"

# Blueprint coordinates are quantized to this many decimals on disk.
COORD_DECIMALS = 3


class DocumentError(ValueError):
    """Malformed or mismatched document; `location` points at the problem."""

    def __init__(self, message: str, location: str = "$"):
        self.location = location
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class Override:
    """Editor-applied delta layered over solver output, keyed by element id."""

    id: str
    dx: float = 0.0
    dy: float = 0.0
    sx: float = 1.0
    sy: float = 1.0


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from exc


class _Reader:
    """Strict dict reader that tracks its JSON path for error messages."""

    def __init__(self, data: Any, path: str = "$"):
        if not isinstance(data, dict):
            raise DocumentError(f"expected an object, got {type(data).__name__}", path)
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def get(self, key: str, kind: type | tuple[type, ...], optional: bool = False) -> Any:
        self.seen.add(key)
        if key not in self.data:
            if optional:
                return None
            raise DocumentError(f"missing key {key!r}", self.path)
        value = self.data[key]
        if value is None and optional:
            return None
        if not isinstance(value, kind):
            raise DocumentError(f"key {key!r} has wrong type {type(value).__name__}", self.path)
        if kind is not bool and isinstance(value, bool):
            raise DocumentError(f"key {key!r} has wrong type bool", self.path)
        return value

    def number(self, key: str, optional: bool = False) -> float | None:
        value = self.get(key, (int, float), optional=optional)
        return None if value is None else float(value)

    def finish(self) -> None:
        extra = set(self.data) - self.seen
        if extra:
            raise DocumentError(f"unknown keys: {sorted(extra)}", self.path)

    def child(self, key: str, optional: bool = False) -> "_Reader | None":
        value = self.get(key, dict, optional=optional)
        return None if value is None else _Reader(value, f"{self.path}.{key}")

    def children(self, key: str) -> list["_Reader"]:
        value = self.get(key, list)
        out = []
        for i, item in enumerate(value):
            out.append(_Reader(item, f"{self.path}.{key}[{i}]"))
        return out


def _check_version(reader: _Reader, expected: str) -> None:
    version = reader.get("schema_version", str)
    if version != expected:
        raise DocumentError(f"schema version {version!r} not supported (expected {expected!r})", reader.path)


# --- storyframe ---------------------------------------------------------------


def _span_dict(span: TextSpan | None) -> dict | None:
    return None if span is None else {"start": span.start, "end": span.end}


def _chart_dict(chart: ChartSpec | None) -> dict | None:
    if chart is None:
        return None
    return {
        "kind": chart.kind.value,
        "series": [{"label": label, "value": value} for label, value in chart.series],
        "fraction": list(chart.fraction) if chart.fraction else None,
        "single_value": chart.single_value,
    }


def frame_to_dict(frame: StoryFrame) -> dict:
    return {
        "schema_version": FRAME_SCHEMA,
        "goal": frame.goal,
        "title": frame.title,
        "pieces": [
            {
                "id": piece.id,
                "subtitle": piece.subtitle,
                "content": piece.content,
                "relation_to_goal": piece.relation_to_goal.value,
                "units": [
                    {
                        "id": unit.id,
                        "text": unit.text,
                        "insight": unit.insight.value,
                        "primary_highlight": _span_dict(unit.primary_highlight),
                        "secondary_highlights": [_span_dict(s) for s in unit.secondary_highlights],
                        "icon_keyword": unit.icon_keyword,
                        "chart": _chart_dict(unit.chart),
                    }
                    for unit in piece.units
                ],
            }
            for piece in frame.pieces
        ],
        "relations": [
            {"from_id": rel.from_id, "to_id": rel.to_id, "kind": rel.kind.value} for rel in frame.relations
        ],
        "stylization": {
            "theme_colors": list(frame.stylization.theme_colors),
            "background": frame.stylization.background,
            "fonts": {role: frame.stylization.fonts.get(role, "") for role in ("title", "subtitle", "highlight", "regular")},
            "text_colors": {
                role: frame.stylization.text_colors.get(role, "")
                for role in ("primary_highlight", "secondary_highlight", "regular")
            },
        },
    }


def serialize_frame(frame: StoryFrame) -> str:
    return _dump(frame_to_dict(frame))


def _parse_span(reader: _Reader | None) -> TextSpan | None:
    if reader is None:
        return None
    span = TextSpan(start=int(reader.number("start")), end=int(reader.number("end")))
    reader.finish()
    return span


def _parse_chart(reader: _Reader | None) -> ChartSpec | None:
    if reader is None:
        return None
    kind_name = reader.get("kind", str)
    try:
        kind = ChartKind(kind_name.strip().lower())
    except ValueError:
        raise DocumentError(f"unknown chart kind {kind_name!r}", reader.path) from None
    series = []
    for entry in reader.children("series"):
        series.append((entry.get("label", str), float(entry.number("value"))))
        entry.finish()
    fraction_raw = reader.get("fraction", list, optional=True)
    fraction = None
    if fraction_raw is not None:
        if len(fraction_raw) != 2 or not all(isinstance(v, int) for v in fraction_raw):
            raise DocumentError("fraction must be [numerator, denominator]", reader.path)
        fraction = (fraction_raw[0], fraction_raw[1])
    single_value = reader.number("single_value", optional=True)
    reader.finish()
    return ChartSpec(kind=kind, series=tuple(series), fraction=fraction, single_value=single_value)


def frame_from_dict(data: Any, path: str = "$") -> StoryFrame:
    root = _Reader(data, path)
    _check_version(root, FRAME_SCHEMA)
    goal = root.get("goal", str)
    title = root.get("title", str)

    pieces = []
    for piece_reader in root.children("pieces"):
        units = []
        for unit_reader in piece_reader.children("units"):
            insight_name = unit_reader.get("insight", str)
            try:
                insight = parse_insight_kind(insight_name)
            except ValueError as exc:
                raise DocumentError(str(exc), unit_reader.path) from None
            secondary = []
            raw_list = unit_reader.get("secondary_highlights", list)
            for i, raw in enumerate(raw_list):
                span = _parse_span(_Reader(raw, f"{unit_reader.path}.secondary_highlights[{i}]"))
                if span is not None:
                    secondary.append(span)
            units.append(
                StoryUnit(
                    id=unit_reader.get("id", str),
                    text=unit_reader.get("text", str),
                    insight=insight,
                    primary_highlight=_parse_span(unit_reader.child("primary_highlight", optional=True)),
                    secondary_highlights=tuple(secondary),
                    icon_keyword=unit_reader.get("icon_keyword", str, optional=True),
                    chart=_parse_chart(unit_reader.child("chart", optional=True)),
                )
            )
            unit_reader.finish()
        try:
            relation = parse_relation_kind(piece_reader.get("relation_to_goal", str))
        except ValueError as exc:
            raise DocumentError(str(exc), piece_reader.path) from None
        pieces.append(
            StoryPiece(
                id=piece_reader.get("id", str),
                subtitle=piece_reader.get("subtitle", str),
                content=piece_reader.get("content", str),
                relation_to_goal=relation,
                units=tuple(units),
            )
        )
        piece_reader.finish()

    relations = []
    for rel_reader in root.children("relations"):
        try:
            kind = parse_relation_kind(rel_reader.get("kind", str))
        except ValueError as exc:
            raise DocumentError(str(exc), rel_reader.path) from None
        relations.append(
            PieceRelation(from_id=rel_reader.get("from_id", str), to_id=rel_reader.get("to_id", str), kind=kind)
        )
        rel_reader.finish()

    style_reader = root.child("stylization")
    fonts_reader = style_reader.child("fonts")
    colors_reader = style_reader.child("text_colors")
    stylization = Stylization(
        theme_colors=tuple(style_reader.get("theme_colors", list)),
        background=style_reader.get("background", str),
        fonts={role: fonts_reader.get(role, str) for role in ("title", "subtitle", "highlight", "regular")},
        text_colors={
            role: colors_reader.get(role, str) for role in ("primary_highlight", "secondary_highlight", "regular")
        },
    )
    fonts_reader.finish()
    colors_reader.finish()
    style_reader.finish()
    root.finish()

    return StoryFrame(goal=goal, title=title, pieces=tuple(pieces), relations=tuple(relations), stylization=stylization)


def parse_frame(text: str) -> StoryFrame:
    return frame_from_dict(_loads(text))


# --- metrics ------------------------------------------------------------------


def metrics_to_dict(metrics: StoryMetrics) -> dict:
    return {
        "schema_version": METRICS_SCHEMA,
        "n_sp": metrics.n_sp,
        "n_su": metrics.n_su,
        "rho_su": metrics.rho_su,
        "rho_rel": metrics.rho_rel,
        "relation_counts": {kind.value: count for kind, count in sorted(metrics.relation_counts.items(), key=lambda kv: kv[0].value)},
        "goal_relation_counts": {
            kind.value: count for kind, count in sorted(metrics.goal_relation_counts.items(), key=lambda kv: kv[0].value)
        },
        "ref": list(metrics.ref),
    }


def serialize_metrics(metrics: StoryMetrics) -> str:
    return _dump(metrics_to_dict(metrics))


# --- ranking ------------------------------------------------------------------


def ranking_to_dict(ranking: LayoutRanking) -> dict:
    return {
        "schema_version": RANKING_SCHEMA,
        "scores": {kind.value: ranking.scores[kind] for kind in LayoutKind},
        "order": [kind.value for kind in ranking.order],
        "firings": [{"rule_id": f.rule_id, "layout": f.layout.value} for f in ranking.firings],
    }


def serialize_ranking(ranking: LayoutRanking) -> str:
    return _dump(ranking_to_dict(ranking))


def ranking_from_dict(data: Any, path: str = "$") -> LayoutRanking:
    root = _Reader(data, path)
    _check_version(root, RANKING_SCHEMA)
    scores_raw = root.get("scores", dict)
    scores = {parse_layout_kind(name): int(value) for name, value in scores_raw.items()}
    order = tuple(parse_layout_kind(name) for name in root.get("order", list))
    firings = []
    for firing_reader in root.children("firings"):
        firings.append(
            RuleFiring(rule_id=firing_reader.get("rule_id", str), layout=parse_layout_kind(firing_reader.get("layout", str)))
        )
        firing_reader.finish()
    root.finish()
    return LayoutRanking(scores=scores, order=order, firings=tuple(firings))


def parse_ranking(text: str) -> LayoutRanking:
    return ranking_from_dict(_loads(text))


# --- blueprint ----------------------------------------------------------------


def _round(value: float) -> float:
    rounded = round(value, COORD_DECIMALS)
    return 0.0 if rounded == 0 else rounded


def _rect_dict(rect: Rect | None) -> dict | None:
    if rect is None:
        return None
    return {"x": _round(rect.x), "y": _round(rect.y), "w": _round(rect.w), "h": _round(rect.h)}


def blueprint_to_dict(blueprint: Blueprint, overrides: list[Override] | None = None) -> dict:
    fonts = blueprint.font_heights()
    return {
        "schema_version": BLUEPRINT_SCHEMA,
        "layout": blueprint.layout.value,
        "canvas": {"width": _round(blueprint.canvas.width), "height": _round(blueprint.canvas.height)},
        "x": _round(blueprint.x),
        "fonts": {role: _round(fonts[role]) for role in ("title", "subtitle", "highlight", "regular")},
        "title_box": _rect_dict(blueprint.title_box),
        "sp_boxes": [
            {
                "piece_id": sp.piece_id,
                "rect": _rect_dict(sp.rect),
                "subtitle_box": _rect_dict(sp.subtitle_box),
                "units": [
                    {
                        "unit_id": su.unit_id,
                        "rect": _rect_dict(su.rect),
                        "highlight_box": _rect_dict(su.highlight_box),
                        "text_box": _rect_dict(su.text_box),
                        "icon_box": _rect_dict(su.icon_box),
                        "chart_box": _rect_dict(su.chart_box),
                        "strategy": su.chosen_strategy,
                        "aspect": su.chosen_aspect,
                    }
                    for su in sp.units
                ],
            }
            for sp in blueprint.sp_boxes
        ],
        "spiral_path": [[_round(px), _round(py)] for px, py in blueprint.spiral_path] if blueprint.spiral_path else None,
        "center_box": _rect_dict(blueprint.center_box),
        "overrides": [
            {"id": o.id, "dx": o.dx, "dy": o.dy, "sx": o.sx, "sy": o.sy} for o in (overrides or [])
        ],
        "warnings": list(blueprint.warnings),
    }


def serialize_blueprint(blueprint: Blueprint, overrides: list[Override] | None = None) -> str:
    return _dump(blueprint_to_dict(blueprint, overrides))


def _parse_rect(reader: _Reader | None) -> Rect | None:
    if reader is None:
        return None
    rect = Rect(
        x=reader.number("x"),
        y=reader.number("y"),
        w=reader.number("w"),
        h=reader.number("h"),
    )
    reader.finish()
    return rect


def blueprint_from_dict(data: Any, path: str = "$") -> tuple[Blueprint, list[Override]]:
    root = _Reader(data, path)
    _check_version(root, BLUEPRINT_SCHEMA)
    layout = parse_layout_kind(root.get("layout", str))
    canvas_reader = root.child("canvas")
    canvas = Canvas(width=canvas_reader.number("width"), height=canvas_reader.number("height"))
    canvas_reader.finish()
    x = root.number("x")
    fonts_reader = root.child("fonts")
    for role in ("title", "subtitle", "highlight", "regular"):
        fonts_reader.number(role)
    fonts_reader.finish()
    title_box = _parse_rect(root.child("title_box"))

    sp_boxes = []
    for sp_reader in root.children("sp_boxes"):
        units = []
        for su_reader in sp_reader.children("units"):
            aspect = su_reader.number("aspect", optional=True)
            units.append(
                SUBox(
                    unit_id=su_reader.get("unit_id", str),
                    rect=_parse_rect(su_reader.child("rect")),
                    highlight_box=_parse_rect(su_reader.child("highlight_box", optional=True)),
                    text_box=_parse_rect(su_reader.child("text_box")),
                    icon_box=_parse_rect(su_reader.child("icon_box", optional=True)),
                    chart_box=_parse_rect(su_reader.child("chart_box", optional=True)),
                    chosen_strategy=su_reader.get("strategy", str),
                    chosen_aspect=aspect,
                )
            )
            su_reader.finish()
        sp_boxes.append(
            PieceLayout(
                piece_id=sp_reader.get("piece_id", str),
                rect=_parse_rect(sp_reader.child("rect")),
                subtitle_box=_parse_rect(sp_reader.child("subtitle_box", optional=True)),
                units=tuple(units),
            )
        )
        sp_reader.finish()

    spiral_raw = root.get("spiral_path", list, optional=True)
    spiral_path = tuple((float(px), float(py)) for px, py in spiral_raw) if spiral_raw is not None else None
    center_box = _parse_rect(root.child("center_box", optional=True))

    overrides = []
    for override_reader in root.children("overrides"):
        overrides.append(
            Override(
                id=override_reader.get("id", str),
                dx=override_reader.number("dx"),
                dy=override_reader.number("dy"),
                sx=override_reader.number("sx"),
                sy=override_reader.number("sy"),
            )
        )
        override_reader.finish()

    warnings = tuple(str(w) for w in root.get("warnings", list))
    root.finish()

    blueprint = Blueprint(
        layout=layout,
        canvas=canvas,
        x=x,
        title_box=title_box,
        sp_boxes=tuple(sp_boxes),
        spiral_path=spiral_path,
        center_box=center_box,
        warnings=warnings,
    )
    return blueprint, overrides


def parse_blueprint(text: str) -> tuple[Blueprint, list[Override]]:
    return blueprint_from_dict(_loads(text))
