"""End-to-end orchestration: text to frame to ranking to blueprint to SVG.

The pipeline is a thin composition of the library stages so the CLI and the
service stay in lockstep: both call exactly these functions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .blueprint import Blueprint, Canvas, default_canvas, make_blueprint
from .charts import map_insight_to_chart, parse_numbers, trend_direction_hint
from .docio import Override
from .model import (
    DataInsightKind,
    InvalidFrameError,
    LayoutKind,
    StoryFrame,
    StoryUnit,
    compute_metrics,
    validate_frame,
)
from .providers import IconAsset, Provider
from .recommend import LayoutRanking, score_layouts
from .render import render


@dataclass(frozen=True)
class PipelineResult:
    frame: StoryFrame
    ranking: LayoutRanking
    layout: LayoutKind
    blueprint: Blueprint
    svg: str
    warnings: tuple[str, ...]


def enrich_unit(unit: StoryUnit, provider: Provider) -> StoryUnit:
    """Attach highlights, icon keyword, and chart suggestions to a bare unit."""
    primary, secondary = provider.suggest_highlights(unit)
    unit = replace(unit, primary_highlight=primary, secondary_highlights=secondary)

    keyword = provider.suggest_icon_keyword(unit)
    chart = map_insight_to_chart(unit.insight, parse_numbers(unit.text))
    if chart is None and unit.insight is DataInsightKind.TREND:
        # Qualitative trends get a directional icon instead of a chart.
        keyword = trend_direction_hint(unit.text) or keyword
    return replace(unit, icon_keyword=keyword, chart=chart)


def build_frame(text: str, goal: str, provider: Provider, seed: int | None = None) -> StoryFrame:
    """Run story construction and visual encoding; returns a validated frame."""
    extraction = provider.segment_story(text, goal)

    pieces = []
    for piece in extraction.pieces:
        units = tuple(enrich_unit(unit, provider) for unit in provider.extract_units(piece))
        pieces.append(replace(piece, units=units))

    summary = "\n".join([goal] + [piece.subtitle for piece in pieces])
    stylization = provider.suggest_stylization(summary, seed=seed)

    frame = StoryFrame(
        goal=goal,
        title=goal.strip().rstrip("?.!"),
        pieces=tuple(pieces),
        relations=extraction.relations,
        stylization=stylization,
    )
    violations = validate_frame(frame)
    if violations:
        raise InvalidFrameError(violations)
    return frame


def collect_icons(frame: StoryFrame, provider: Provider, warnings: list[str] | None = None) -> dict[str, IconAsset]:
    """Fetch one asset per distinct icon keyword; fallbacks become warnings."""
    sink = warnings if warnings is not None else []
    assets: dict[str, IconAsset] = {}
    keywords = sorted({unit.icon_keyword for piece in frame.pieces for unit in piece.units if unit.icon_keyword})
    for keyword in keywords:
        asset = provider.fetch_icon(keyword, frame.stylization)
        if asset.fallback_reason:
            sink.append(f"icon for {keyword!r} fell back: {asset.fallback_reason}")
        assets[keyword] = asset
    return assets


def run_pipeline(
    text: str,
    goal: str,
    provider: Provider,
    layout: LayoutKind | None = None,
    canvas: Canvas | None = None,
    seed: int | None = None,
    overrides: list[Override] | None = None,
) -> PipelineResult:
    """Full text-to-SVG run; `layout` overrides the recommender's top pick."""
    warnings: list[str] = []
    frame = build_frame(text, goal, provider, seed=seed)
    ranking = score_layouts(compute_metrics(frame))
    chosen = layout or ranking.top
    blueprint = make_blueprint(frame, chosen, canvas=canvas or default_canvas(chosen))
    warnings.extend(blueprint.warnings)
    assets = collect_icons(frame, provider, warnings)
    svg = render(frame, blueprint, frame.stylization, assets, overrides=overrides, warnings=warnings)
    return PipelineResult(
        frame=frame,
        ranking=ranking,
        layout=chosen,
        blueprint=blueprint,
        svg=svg,
        warnings=tuple(warnings),
    )
