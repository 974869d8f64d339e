"""Domain model for storytelling infographics.

A story frame is the full narrative structure: story pieces connected by
narrative-logic relations, each piece carrying story units (one data insight
plus its visual designs: highlights, icon keyword, chart). Everything here is
an immutable value object; validation returns violations as data instead of
raising, because a half-edited frame is a normal state in the editor.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

__all__ = [
    "NarrativeRelationKind",
    "DataInsightKind",
    "LayoutKind",
    "TextSpan",
    "ChartKind",
    "ChartSpec",
    "StoryUnit",
    "StoryPiece",
    "PieceRelation",
    "Stylization",
    "StoryFrame",
    "StoryMetrics",
    "Violation",
    "InvalidFrameError",
    "validate_frame",
    "compute_metrics",
]

_HEX_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")

FONT_ROLES = ("title", "subtitle", "highlight", "regular")
TEXT_COLOR_ROLES = ("primary_highlight", "secondary_highlight", "regular")

MAX_PIECES = 10
MAX_UNITS_PER_PIECE = 4
MAX_PICTOGRAPH_DENOMINATOR = 20


class NarrativeRelationKind(Enum):
    """Coherence relation between story pieces, or between a piece and the goal."""

    SIMILARITY = "similarity"
    CAUSE_EFFECT = "cause_effect"
    CONTRAST = "contrast"
    VIOLATED_EXPECTATION = "violated_expectation"
    TEMPORAL = "temporal"
    ATTRIBUTION = "attribution"
    EXAMPLE = "example"
    GENERALIZATION = "generalization"
    ELABORATION = "elaboration"


class DataInsightKind(Enum):
    """Analytic type of the insight a story unit carries."""

    VALUE = "value"
    DIFFERENCE = "difference"
    PROPORTION = "proportion"
    TREND = "trend"
    CATEGORIZATION = "categorization"
    DISTRIBUTION = "distribution"
    RANK = "rank"
    EXTREME = "extreme"
    TEXTUAL_STATEMENT = "textual_statement"


class LayoutKind(Enum):
    """Layout family governing piece arrangement.

    Definition order is the canonical order used for ranking tie-breaks;
    do not reorder members.
    """

    GRID = "grid"
    SPIRAL = "spiral"
    LANDSCAPE = "landscape"
    STAR = "star"
    PORTRAIT = "portrait"
    PORTRAIT_GRID = "portrait_grid"

    @property
    def canonical_index(self) -> int:
        return _LAYOUT_ORDER[self]


_LAYOUT_ORDER = {kind: i for i, kind in enumerate(LayoutKind)}

# Accepted spelling variants seen in the wild (source material included).
_RELATION_ALIASES = {
    "silimarity": "similarity",
    "cause-effect": "cause_effect",
    "causeeffect": "cause_effect",
    "violatedexpectation": "violated_expectation",
}


def parse_relation_kind(value: str) -> NarrativeRelationKind:
    key = value.strip().lower().replace(" ", "_").replace("-", "_")
    key = _RELATION_ALIASES.get(key, key)
    try:
        return NarrativeRelationKind(key)
    except ValueError:
        raise ValueError(f"unknown narrative relation kind: {value!r}") from None


def parse_insight_kind(value: str) -> DataInsightKind:
    key = value.strip().lower().replace(" ", "_").replace("-", "_")
    try:
        return DataInsightKind(key)
    except ValueError:
        raise ValueError(f"unknown data insight kind: {value!r}") from None


def parse_layout_kind(value: str) -> LayoutKind:
    key = value.strip().lower().replace(" ", "_").replace("-", "_")
    if key == "portraitgrid":
        key = "portrait_grid"
    try:
        return LayoutKind(key)
    except ValueError:
        raise ValueError(f"unknown layout kind: {value!r}") from None


@dataclass(frozen=True)
class TextSpan:
    """Half-open character range [start, end) into the owning unit text."""

    start: int
    end: int

    def overlaps(self, other: TextSpan) -> bool:
        return self.start < other.end and other.start < self.end

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


class ChartKind(Enum):
    PIE = "pie"
    BAR = "bar"
    LINE = "line"
    SINGLE_PIE = "single_pie"
    PICTOGRAPH = "pictograph"


@dataclass(frozen=True)
class ChartSpec:
    """Chart suggestion attached to a story unit.

    `fraction` is set only for pictographs, `single_value` (a percentage)
    only for single-slice pies.
    """

    kind: ChartKind
    series: tuple[tuple[str, float], ...] = ()
    fraction: tuple[int, int] | None = None
    single_value: float | None = None


@dataclass(frozen=True)
class StoryUnit:
    id: str
    text: str
    insight: DataInsightKind
    primary_highlight: TextSpan | None = None
    secondary_highlights: tuple[TextSpan, ...] = ()
    icon_keyword: str | None = None
    chart: ChartSpec | None = None

    def all_highlights(self) -> tuple[TextSpan, ...]:
        spans = []
        if self.primary_highlight is not None:
            spans.append(self.primary_highlight)
        spans.extend(self.secondary_highlights)
        return tuple(spans)


@dataclass(frozen=True)
class StoryPiece:
    id: str
    subtitle: str
    content: str
    relation_to_goal: NarrativeRelationKind
    units: tuple[StoryUnit, ...] = ()


@dataclass(frozen=True)
class PieceRelation:
    """Directed narrative link between two pieces (from_id -> to_id)."""

    from_id: str
    to_id: str
    kind: NarrativeRelationKind


@dataclass(frozen=True)
class Stylization:
    theme_colors: tuple[str, ...]
    background: str
    fonts: dict[str, str]
    text_colors: dict[str, str]


@dataclass(frozen=True)
class StoryFrame:
    goal: str
    title: str
    pieces: tuple[StoryPiece, ...]
    relations: tuple[PieceRelation, ...]
    stylization: Stylization

    def piece_by_id(self, piece_id: str) -> StoryPiece:
        for piece in self.pieces:
            if piece.id == piece_id:
                return piece
        raise KeyError(piece_id)


@dataclass(frozen=True)
class StoryMetrics:
    """Scoring features derived from a frame.

    `rho_su` is the piece-to-unit ratio n_sp / n_su: a frame whose pieces
    each pack several units has a low ratio. `relation_counts` tallies every
    narrative-logic label in the frame (each piece's relation to the goal
    plus each inter-piece relation); `goal_relation_counts` tallies the
    goal relations alone. `ref` is the per-piece in-degree over inter-piece
    relations, in frame piece order.
    """

    n_sp: int
    n_su: int
    rho_su: float
    rho_rel: float
    relation_counts: dict[NarrativeRelationKind, int]
    goal_relation_counts: dict[NarrativeRelationKind, int]
    ref: tuple[int, ...]


@dataclass(frozen=True)
class Violation:
    """One broken invariant: where it is, which rule broke, and a message."""

    path: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.rule} ({self.message})"


class InvalidFrameError(ValueError):
    """Raised by operations whose precondition is a valid frame."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        summary = "; ".join(str(v) for v in violations[:5])
        if len(violations) > 5:
            summary += f"; +{len(violations) - 5} more"
        super().__init__(f"invalid story frame: {summary}")


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value)


def _check_chart(chart: ChartSpec, path: str, out: list[Violation]) -> None:
    for i, (label, value) in enumerate(chart.series):
        if not _finite(value):
            out.append(Violation(f"{path}.series[{i}]", "non-finite value", f"value for {label!r} is not finite"))
    if chart.kind in (ChartKind.PIE, ChartKind.BAR):
        if len(chart.series) < 2:
            out.append(Violation(path, "series < 2", f"{chart.kind.value} chart needs at least 2 entries"))
        if chart.kind is ChartKind.PIE and any(v < 0 for _, v in chart.series if _finite(v)):
            out.append(Violation(path, "negative pie value", "pie slices must be nonnegative"))
    elif chart.kind is ChartKind.LINE:
        if len(chart.series) < 3:
            out.append(Violation(path, "series < 3", "line chart needs at least 3 time points"))
    elif chart.kind is ChartKind.SINGLE_PIE:
        if chart.single_value is None:
            out.append(Violation(path, "missing single_value", "single_pie chart needs single_value"))
        elif not _finite(chart.single_value) or not (0.0 <= chart.single_value <= 100.0):
            out.append(Violation(path, "single_value out of range", "single_value must be in [0, 100]"))
        if chart.series:
            out.append(Violation(path, "unexpected series", "single_pie chart takes no series"))
    elif chart.kind is ChartKind.PICTOGRAPH:
        if chart.fraction is None:
            out.append(Violation(path, "missing fraction", "pictograph needs a fraction"))
        else:
            num, den = chart.fraction
            if not (1 <= num <= den <= MAX_PICTOGRAPH_DENOMINATOR):
                out.append(
                    Violation(
                        path,
                        "invalid fraction",
                        f"need 1 <= numerator <= denominator <= {MAX_PICTOGRAPH_DENOMINATOR}, got {num}/{den}",
                    )
                )
    if chart.fraction is not None and chart.kind is not ChartKind.PICTOGRAPH:
        out.append(Violation(path, "unexpected fraction", "fraction is only valid for pictographs"))
    if chart.single_value is not None and chart.kind is not ChartKind.SINGLE_PIE:
        out.append(Violation(path, "unexpected single_value", "single_value is only valid for single_pie"))


def _check_spans(unit: StoryUnit, path: str, out: list[Violation]) -> None:
    spans = unit.all_highlights()
    for span in spans:
        if not (0 <= span.start < span.end <= len(unit.text)):
            out.append(
                Violation(
                    path,
                    "invalid span",
                    f"span [{span.start}, {span.end}) out of range for text of length {len(unit.text)}",
                )
            )
    valid = [s for s in spans if 0 <= s.start < s.end <= len(unit.text)]
    for i in range(len(valid)):
        for j in range(i + 1, len(valid)):
            if valid[i].overlaps(valid[j]):
                out.append(
                    Violation(
                        path,
                        "overlapping highlight spans",
                        f"spans [{valid[i].start}, {valid[i].end}) and [{valid[j].start}, {valid[j].end}) overlap",
                    )
                )
                return


def _check_stylization(style: Stylization, out: list[Violation]) -> None:
    if not (3 <= len(style.theme_colors) <= 5):
        out.append(
            Violation("stylization.theme_colors", "theme colors not in 3..5", f"got {len(style.theme_colors)}")
        )
    for i, color in enumerate(style.theme_colors):
        if not _HEX_COLOR.match(color):
            out.append(Violation(f"stylization.theme_colors[{i}]", "invalid color", f"{color!r} is not #RRGGBB"))
    if not _HEX_COLOR.match(style.background):
        out.append(Violation("stylization.background", "invalid color", f"{style.background!r} is not #RRGGBB"))
    for role in FONT_ROLES:
        if not style.fonts.get(role):
            out.append(Violation("stylization.fonts", "missing font role", f"no font for {role!r}"))
    for role in TEXT_COLOR_ROLES:
        color = style.text_colors.get(role)
        if not color:
            out.append(Violation("stylization.text_colors", "missing text color role", f"no color for {role!r}"))
        elif not _HEX_COLOR.match(color):
            out.append(Violation("stylization.text_colors", "invalid color", f"{color!r} is not #RRGGBB"))


def validate_chart(chart: ChartSpec, path: str = "chart") -> list[Violation]:
    """Check a chart spec on its own; used by the mapper as defense in depth."""
    out: list[Violation] = []
    _check_chart(chart, path, out)
    return out


def validate_frame(frame: StoryFrame, allow_empty_units: bool = False) -> list[Violation]:
    """Check every frame invariant; an empty report means the frame is valid.

    `allow_empty_units` relaxes the per-piece unit minimum for frames that
    are mid-construction (pieces segmented, units not yet extracted).
    """
    out: list[Violation] = []
    if len(frame.pieces) == 0:
        out.append(Violation("pieces", "pieces empty", "a frame needs at least one story piece"))
    if len(frame.pieces) > MAX_PIECES:
        out.append(Violation("pieces", "pieces > 10", f"got {len(frame.pieces)} story pieces"))

    seen_piece_ids: set[str] = set()
    seen_unit_ids: set[str] = set()
    for p_idx, piece in enumerate(frame.pieces):
        p_path = f"pieces[{p_idx}]"
        if not piece.id:
            out.append(Violation(p_path, "empty piece id", "piece id must be non-empty"))
        elif piece.id in seen_piece_ids:
            out.append(Violation(p_path, "duplicate piece id", f"id {piece.id!r} appears more than once"))
        seen_piece_ids.add(piece.id)

        if len(piece.units) == 0 and not allow_empty_units:
            out.append(Violation(f"{p_path}.units", "units empty", "a piece needs at least one story unit"))
        if len(piece.units) > MAX_UNITS_PER_PIECE:
            out.append(Violation(f"{p_path}.units", "units > 4", f"got {len(piece.units)} story units"))

        for u_idx, unit in enumerate(piece.units):
            u_path = f"{p_path}.units[{u_idx}]"
            if not unit.id:
                out.append(Violation(u_path, "empty unit id", "unit id must be non-empty"))
            elif unit.id in seen_unit_ids:
                out.append(Violation(u_path, "duplicate unit id", f"id {unit.id!r} appears more than once"))
            seen_unit_ids.add(unit.id)
            if not unit.text:
                out.append(Violation(u_path, "unit text empty", "unit text must be non-empty"))
            _check_spans(unit, u_path, out)
            if unit.chart is not None:
                _check_chart(unit.chart, f"{u_path}.chart", out)

    seen_relations: set[tuple[str, str, NarrativeRelationKind]] = set()
    for r_idx, rel in enumerate(frame.relations):
        r_path = f"relations[{r_idx}]"
        if rel.from_id == rel.to_id:
            out.append(Violation(r_path, "self relation", f"{rel.from_id!r} relates to itself"))
        for endpoint in (rel.from_id, rel.to_id):
            if endpoint not in seen_piece_ids:
                out.append(Violation(r_path, "unknown relation endpoint", f"no piece with id {endpoint!r}"))
        triple = (rel.from_id, rel.to_id, rel.kind)
        if triple in seen_relations:
            out.append(Violation(r_path, "duplicate relation", f"{triple!r} appears more than once"))
        seen_relations.add(triple)

    _check_stylization(frame.stylization, out)
    return out


def require_valid(frame: StoryFrame, allow_empty_units: bool = False) -> None:
    violations = validate_frame(frame, allow_empty_units=allow_empty_units)
    if violations:
        raise InvalidFrameError(violations)


def compute_metrics(frame: StoryFrame) -> StoryMetrics:
    """Derive the scoring features of a frame.

    Rejects invalid frames: every downstream consumer assumes the counts
    came from a structure that satisfies the model invariants.
    """
    require_valid(frame)

    n_sp = len(frame.pieces)
    n_su = sum(len(piece.units) for piece in frame.pieces)

    relation_counts: dict[NarrativeRelationKind, int] = {k: 0 for k in NarrativeRelationKind}
    goal_relation_counts: dict[NarrativeRelationKind, int] = {k: 0 for k in NarrativeRelationKind}
    for piece in frame.pieces:
        relation_counts[piece.relation_to_goal] += 1
        goal_relation_counts[piece.relation_to_goal] += 1
    for rel in frame.relations:
        relation_counts[rel.kind] += 1

    connected: set[str] = set()
    indegree = {piece.id: 0 for piece in frame.pieces}
    for rel in frame.relations:
        connected.add(rel.from_id)
        connected.add(rel.to_id)
        indegree[rel.to_id] += 1

    return StoryMetrics(
        n_sp=n_sp,
        n_su=n_su,
        rho_su=n_sp / n_su,
        rho_rel=len(connected) / n_sp,
        relation_counts={k: v for k, v in relation_counts.items() if v},
        goal_relation_counts={k: v for k, v in goal_relation_counts.items() if v},
        ref=tuple(indegree[piece.id] for piece in frame.pieces),
    )


def related_pairs(relations: Iterable[PieceRelation]) -> set[frozenset[str]]:
    """Unordered piece pairs connected by at least one relation."""
    return {frozenset((rel.from_id, rel.to_id)) for rel in relations if rel.from_id != rel.to_id}
