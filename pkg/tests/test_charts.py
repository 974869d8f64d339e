"""Numeric parsing and the insight-to-chart rule table."""

from __future__ import annotations

import random

from infoweave.charts import NumericParse, map_insight_to_chart, parse_numbers, trend_direction_hint
from infoweave.model import ChartKind, DataInsightKind, validate_chart


class TestParseNumbers:
    def test_part_whole_sentence(self):
        parse = parse_numbers("339 women survived out of 466 on board")
        assert parse.out_of_pairs == ((339.0, 466.0),)
        assert parse.out_of_labels == (("survived", "on board"),)
        assert parse.bare_values == ()

    def test_percentage(self):
        parse = parse_numbers("61.9% of first class survived")
        assert parse.percentages == (61.9,)
        assert parse.out_of_pairs == ()

    def test_fraction(self):
        parse = parse_numbers("about 1 in 10 passengers were children")
        assert parse.fractions == ((1, 10),)

    def test_no_numbers(self):
        assert parse_numbers("no numbers here") == NumericParse()

    def test_time_points(self):
        parse = parse_numbers("in 2001 exports reached 120, in 2002 they hit 150, and in 2003 they hit 180")
        assert parse.time_points == (("2001", 120.0), ("2002", 150.0), ("2003", 180.0))

    def test_bare_values_with_labels(self):
        parse = parse_numbers("the fleet counted 14 trawlers and 9 ferries")
        assert parse.bare_values == (("trawlers and", 14.0), ("ferries", 9.0))

    def test_purity(self):
        text = "339 out of 466 and 61.9% in 2001 with 120"
        assert parse_numbers(text) == parse_numbers(text)


class TestMappingRules:
    def test_difference_part_whole_becomes_bar(self):
        parse = parse_numbers("339 women survived out of 466 on board")
        chart = map_insight_to_chart(DataInsightKind.DIFFERENCE, parse)
        assert chart.kind is ChartKind.BAR
        assert chart.series == (("survived", 339.0), ("on board", 466.0))

    def test_single_percentage_becomes_single_pie(self):
        chart = map_insight_to_chart(DataInsightKind.PROPORTION, parse_numbers("61.9% of first class survived"))
        assert chart.kind is ChartKind.SINGLE_PIE
        assert chart.single_value == 61.9

    def test_fraction_becomes_pictograph(self):
        chart = map_insight_to_chart(DataInsightKind.PROPORTION, parse_numbers("about 1 in 10 were children"))
        assert chart.kind is ChartKind.PICTOGRAPH
        assert chart.fraction == (1, 10)

    def test_two_time_points_yield_nothing(self):
        parse = parse_numbers("in 2001 exports reached 120 and in 2002 they hit 150")
        assert len(parse.time_points) == 2
        assert map_insight_to_chart(DataInsightKind.TREND, parse) is None

    def test_three_time_points_yield_line(self):
        parse = parse_numbers("in 2001 exports hit 120, in 2002 they hit 150, in 2003 they hit 180")
        chart = map_insight_to_chart(DataInsightKind.TREND, parse)
        assert chart.kind is ChartKind.LINE
        assert [label for label, _ in chart.series] == ["2001", "2002", "2003"]

    def test_textual_statement_never_charts(self):
        parse = parse_numbers("339 out of 466 with 61.9%")
        assert map_insight_to_chart(DataInsightKind.TEXTUAL_STATEMENT, parse) is None

    def test_two_percentages_pie_for_proportion(self):
        parse = parse_numbers("61.9% in first class but 25.4% in third class")
        chart = map_insight_to_chart(DataInsightKind.PROPORTION, parse)
        assert chart.kind is ChartKind.PIE
        assert len(chart.series) == 2

    def test_oversized_fraction_falls_through(self):
        parse = parse_numbers("about 3 in 100 were crew, and 12% were officers")
        chart = map_insight_to_chart(DataInsightKind.PROPORTION, parse)
        assert chart is not None and chart.kind is not ChartKind.PICTOGRAPH

    def test_value_prefers_labeled_numbers(self):
        parse = parse_numbers("the fleet counted 14 trawlers and 9 ferries")
        chart = map_insight_to_chart(DataInsightKind.VALUE, parse)
        assert chart.kind is ChartKind.BAR
        assert chart.series == (("trawlers and", 14.0), ("ferries", 9.0))


def _random_parse(rng: random.Random) -> NumericParse:
    def maybe(factory, p=0.5):
        return factory() if rng.random() < p else ()

    return NumericParse(
        percentages=maybe(lambda: tuple(round(rng.uniform(-20, 160), 1) for _ in range(rng.randint(1, 3)))),
        out_of_pairs=maybe(lambda: tuple((rng.uniform(-5, 300), rng.uniform(-5, 300)) for _ in range(rng.randint(1, 2)))),
        out_of_labels=(),
        fractions=maybe(lambda: tuple((rng.randint(0, 40), rng.randint(0, 40)) for _ in range(rng.randint(1, 2)))),
        bare_values=maybe(lambda: tuple((f"v{i}", rng.uniform(-100, 100)) for i in range(rng.randint(1, 4)))),
        time_points=maybe(lambda: tuple((str(2000 + i), rng.uniform(-10, 10)) for i in range(rng.randint(1, 5)))),
    )


def test_mapping_is_total_and_valid_or_none():
    rng = random.Random(909)
    for _ in range(800):
        parse = _random_parse(rng)
        # Labels parallel the pairs; pad to match when the generator skipped them.
        parse = NumericParse(
            percentages=parse.percentages,
            out_of_pairs=parse.out_of_pairs,
            out_of_labels=tuple(("part", "whole") for _ in parse.out_of_pairs),
            fractions=parse.fractions,
            bare_values=parse.bare_values,
            time_points=parse.time_points,
        )
        for insight in DataInsightKind:
            chart = map_insight_to_chart(insight, parse)
            if chart is not None:
                assert validate_chart(chart) == [], f"{insight} produced invalid {chart}"


def test_trend_direction_hint():
    assert trend_direction_hint("survival odds improved over time") == "upward arrow"
    assert trend_direction_hint("numbers fell sharply") == "downward arrow"
    assert trend_direction_hint("numbers stayed flat") is None
