"""Shared fixtures: deterministic frame generators and the Titanic fixture."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from infoweave.model import (
    ChartKind,
    ChartSpec,
    DataInsightKind,
    NarrativeRelationKind,
    PieceRelation,
    StoryFrame,
    StoryPiece,
    StoryUnit,
    Stylization,
    TextSpan,
)

DATA_DIR = Path(__file__).parent / "data"

TITANIC_GOAL = "What factors influenced the survival rate on the Titanic?"

_WORDS = (
    "harbor survey stations reported steady winter traffic while coastal crews "
    "tracked cargo volumes ferries fishing vessels storms repairs budgets routes "
    "engines tides exports signals lanterns charts pilots docks timber grain "
    "passengers northern southern island mainland season records growth decline"
).split()


def basic_style() -> Stylization:
    return Stylization(
        theme_colors=("#33658A", "#86BBD8", "#F6AE2D", "#F26419"),
        background="#F4F1EC",
        fonts={"title": "Georgia", "subtitle": "Trebuchet MS", "highlight": "Georgia", "regular": "Verdana"},
        text_colors={"primary_highlight": "#C0272D", "secondary_highlight": "#1C1C1C", "regular": "#333333"},
    )


def make_unit(
    unit_id: str,
    text: str = "Crews logged 120 arrivals out of 240 expected.",
    insight: DataInsightKind = DataInsightKind.VALUE,
    **kwargs,
) -> StoryUnit:
    return StoryUnit(id=unit_id, text=text, insight=insight, **kwargs)


def make_piece(piece_id: str, units: tuple[StoryUnit, ...] | None = None, **kwargs) -> StoryPiece:
    if units is None:
        units = (make_unit(f"{piece_id}-u1"),)
    defaults = dict(
        subtitle=f"Section {piece_id}",
        content="Crews logged traffic through the season.",
        relation_to_goal=NarrativeRelationKind.EXAMPLE,
    )
    defaults.update(kwargs)
    return StoryPiece(id=piece_id, units=units, **defaults)


def make_frame(pieces, relations=(), goal="How did traffic change?", title="Traffic") -> StoryFrame:
    return StoryFrame(goal=goal, title=title, pieces=tuple(pieces), relations=tuple(relations), stylization=basic_style())


def _sentence(rng: random.Random, with_number: bool, n_words: int | None = None) -> str:
    words = [rng.choice(_WORDS) for _ in range(n_words or rng.randint(6, 12))]
    if with_number:
        slot = rng.randrange(len(words))
        words[slot] = str(rng.randint(2, 950))
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def random_unit(rng: random.Random, unit_id: str) -> StoryUnit:
    # Sibling units in one piece carry comparable amounts of text, like real
    # story units; extreme disparity would starve the short unit of a text row.
    text = " ".join(
        _sentence(rng, rng.random() < 0.5, n_words=rng.randint(8, 13)) for _ in range(rng.randint(1, 2))
    )
    insight = rng.choice(list(DataInsightKind))

    # Highlight spans over whole word runs, non-overlapping by construction.
    primary = None
    secondary: list[TextSpan] = []
    if rng.random() < 0.7:
        starts = []
        cursor = 0
        for word in text.split(" "):
            starts.append((cursor, cursor + len(word)))
            cursor += len(word) + 1
        picks = sorted(rng.sample(range(len(starts)), k=min(len(starts), rng.randint(1, 3))))
        spans = [TextSpan(*starts[i]) for i in picks]
        primary, secondary = spans[0], spans[1:]

    chart = None
    if rng.random() < 0.35:
        kind = rng.choice([ChartKind.PIE, ChartKind.BAR, ChartKind.SINGLE_PIE, ChartKind.PICTOGRAPH, ChartKind.LINE])
        if kind in (ChartKind.PIE, ChartKind.BAR):
            series = tuple((f"s{i}", float(rng.randint(1, 400))) for i in range(rng.randint(2, 4)))
            chart = ChartSpec(kind=kind, series=series)
        elif kind is ChartKind.LINE:
            series = tuple((str(2000 + i), float(rng.randint(1, 400))) for i in range(rng.randint(3, 6)))
            chart = ChartSpec(kind=kind, series=series)
        elif kind is ChartKind.SINGLE_PIE:
            chart = ChartSpec(kind=kind, single_value=round(rng.uniform(1, 99), 1))
        else:
            den = rng.randint(2, 20)
            chart = ChartSpec(kind=kind, fraction=(rng.randint(1, den), den))

    return StoryUnit(
        id=unit_id,
        text=text,
        insight=insight,
        primary_highlight=primary,
        secondary_highlights=tuple(secondary),
        icon_keyword=rng.choice(_WORDS) if rng.random() < 0.5 else None,
        chart=chart,
    )


def random_frame(
    rng: random.Random,
    n_pieces: int | None = None,
    max_pieces: int = 10,
    relation_rate: float = 0.5,
) -> StoryFrame:
    n = n_pieces if n_pieces is not None else rng.randint(1, max_pieces)
    pieces = []
    for p in range(n):
        pid = f"sp-{p + 1}"
        units = tuple(random_unit(rng, f"{pid}-su-{u + 1}") for u in range(rng.randint(1, 4)))
        pieces.append(
            StoryPiece(
                id=pid,
                subtitle=_sentence(rng, False).rstrip(".") if rng.random() < 0.9 else "",
                content=" ".join(unit.text for unit in units),
                relation_to_goal=rng.choice(list(NarrativeRelationKind)),
                units=units,
            )
        )

    relations = []
    seen = set()
    if n >= 2:
        for _ in range(rng.randint(0, int(n * relation_rate * 2))):
            a, b = rng.sample(range(n), 2)
            kind = rng.choice(list(NarrativeRelationKind))
            triple = (pieces[a].id, pieces[b].id, kind)
            if triple not in seen:
                seen.add(triple)
                relations.append(PieceRelation(from_id=triple[0], to_id=triple[1], kind=kind))

    return make_frame(pieces, relations, goal="How did the season unfold?", title="Season report")


@pytest.fixture
def titanic_text() -> str:
    return (DATA_DIR / "titanic.txt").read_text(encoding="utf-8")


@pytest.fixture
def style() -> Stylization:
    return basic_style()
