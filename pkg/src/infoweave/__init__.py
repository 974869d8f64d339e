"""infoweave: turn structured story frames into storytelling infographics.

The library covers the full path from raw text to SVG: story extraction via
pluggable providers, rule-based layout ranking, blueprint solving (sizing
equation plus placement), and deterministic SVG rendering. A CLI and an HTTP
service expose the same pipeline for scripting and for the browser editor.
"""

from .blueprint import (
    Blueprint,
    Canvas,
    Rect,
    build_blueprint,
    default_canvas,
    make_blueprint,
    solve_scale,
    total_area,
)
from .cells import assign_sp_cells, plan_cells
from .charts import NumericParse, map_insight_to_chart, parse_numbers
from .docio import (
    Override,
    parse_blueprint,
    parse_frame,
    serialize_blueprint,
    serialize_frame,
    serialize_ranking,
)
from .glyphs import GlyphMetrics, default_glyph_metrics, text_width
from .model import (
    ChartKind,
    ChartSpec,
    DataInsightKind,
    InvalidFrameError,
    LayoutKind,
    NarrativeRelationKind,
    PieceRelation,
    StoryFrame,
    StoryMetrics,
    StoryPiece,
    StoryUnit,
    Stylization,
    TextSpan,
    Violation,
    compute_metrics,
    validate_frame,
)
from .pipeline import build_frame, run_pipeline
from .placement import SUBox, place_unit_designs
from .providers import (
    ContractViolationError,
    ExtractionResult,
    HttpProvider,
    IconAsset,
    MockProvider,
    ProviderConfig,
    ProviderError,
    make_provider,
)
from .recommend import LayoutRanking, RuleFiring, score_layouts
from .render import render, render_chart

__version__ = "0.1.0"
