"""Deterministic mapping from unit text and insight kind to a chart spec.

A small regex grammar pulls numeric structure out of the sentence; the
mapping rules then pick a chart kind for the insight, or nothing when the
numbers cannot carry one. Pure functions throughout; no provider involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import ChartKind, ChartSpec, DataInsightKind, validate_chart

_NUMBER = r"\d+(?:\.\d+)?"

_PERCENT_RE = re.compile(rf"({_NUMBER})\s*%")
_OUT_OF_RE = re.compile(
    rf"({_NUMBER})((?:\s+[A-Za-z][A-Za-z'-]*){{0,4}}?)\s+out\s+of\s+({_NUMBER})((?:\s+[A-Za-z][A-Za-z'-]*){{0,2}})"
)
_N_OF_M_RE = re.compile(rf"({_NUMBER})\s+of\s+({_NUMBER})")
_FRACTION_RE = re.compile(r"(\d+)\s+in\s+(\d+)\b")
_YEAR_RE = re.compile(r"\bin\s+([12]\d{3})\b")
_NUMBER_RE = re.compile(_NUMBER)
_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'-]*")

# How far past "in <year>" to look for the year's value.
_TIME_VALUE_WINDOW = 80


@dataclass(frozen=True)
class NumericParse:
    """Numeric structure extracted from one unit text."""

    percentages: tuple[float, ...] = ()
    out_of_pairs: tuple[tuple[float, float], ...] = ()
    out_of_labels: tuple[tuple[str, str], ...] = ()
    fractions: tuple[tuple[int, int], ...] = ()
    bare_values: tuple[tuple[str, float], ...] = ()
    time_points: tuple[tuple[str, float], ...] = ()


@dataclass
class _SpanTracker:
    taken: list[tuple[int, int]] = field(default_factory=list)

    def claim(self, start: int, end: int) -> None:
        self.taken.append((start, end))

    def overlaps(self, start: int, end: int) -> bool:
        return any(s < end and start < e for s, e in self.taken)


def _following_words(text: str, pos: int, limit: int = 2) -> str:
    """Up to `limit` word tokens following `pos`, stopping at any non-word."""
    words = []
    rest = text[pos:]
    offset = 0
    for _ in range(limit):
        m = re.match(r"\s+([A-Za-z][A-Za-z'-]*)", rest[offset:])
        if not m:
            break
        words.append(m.group(1))
        offset += m.end()
    return " ".join(words)


def parse_numbers(text: str) -> NumericParse:
    """Extract percentages, part/whole pairs, fractions, years, and bare numbers.

    Each number is claimed by at most one category, in the precedence order
    part/whole > fraction > percentage > time point > bare value.
    """
    tracker = _SpanTracker()

    out_of_pairs: list[tuple[float, float]] = []
    out_of_labels: list[tuple[str, str]] = []
    for m in _OUT_OF_RE.finditer(text):
        part, words_between, whole, words_after = m.group(1), m.group(2), m.group(3), m.group(4)
        between = _WORD_RE.findall(words_between)
        part_label = between[-1] if between else "part"
        after = _WORD_RE.findall(words_after)
        whole_label = " ".join(after) if after else "whole"
        out_of_pairs.append((float(part), float(whole)))
        out_of_labels.append((part_label, whole_label))
        tracker.claim(m.start(1), m.end(1))
        tracker.claim(m.start(3), m.end(3))
    for m in _N_OF_M_RE.finditer(text):
        if tracker.overlaps(m.start(1), m.end(1)) or tracker.overlaps(m.start(2), m.end(2)):
            continue
        out_of_pairs.append((float(m.group(1)), float(m.group(2))))
        out_of_labels.append(("part", "whole"))
        tracker.claim(m.start(1), m.end(1))
        tracker.claim(m.start(2), m.end(2))

    fractions: list[tuple[int, int]] = []
    for m in _FRACTION_RE.finditer(text):
        if tracker.overlaps(m.start(1), m.end(1)) or tracker.overlaps(m.start(2), m.end(2)):
            continue
        fractions.append((int(m.group(1)), int(m.group(2))))
        tracker.claim(m.start(1), m.end(1))
        tracker.claim(m.start(2), m.end(2))

    percentages: list[float] = []
    for m in _PERCENT_RE.finditer(text):
        if tracker.overlaps(m.start(1), m.end(1)):
            continue
        percentages.append(float(m.group(1)))
        tracker.claim(m.start(), m.end())

    time_points: list[tuple[str, float]] = []
    for m in _YEAR_RE.finditer(text):
        if tracker.overlaps(m.start(1), m.end(1)):
            continue
        window_end = min(len(text), m.end() + _TIME_VALUE_WINDOW)
        window = text[m.end() : window_end]
        stop = re.search(r"[.;!?]", window)
        if stop:
            window = window[: stop.start()]
        for vm in _NUMBER_RE.finditer(window):
            v_start, v_end = m.end() + vm.start(), m.end() + vm.end()
            if tracker.overlaps(v_start, v_end):
                continue
            time_points.append((m.group(1), float(vm.group(0))))
            tracker.claim(m.start(1), m.end(1))
            tracker.claim(v_start, v_end)
            break

    bare_values: list[tuple[str, float]] = []
    for m in _NUMBER_RE.finditer(text):
        if tracker.overlaps(m.start(), m.end()):
            continue
        label = _following_words(text, m.end()) or "value"
        bare_values.append((label, float(m.group(0))))
        tracker.claim(m.start(), m.end())

    return NumericParse(
        percentages=tuple(percentages),
        out_of_pairs=tuple(out_of_pairs),
        out_of_labels=tuple(out_of_labels),
        fractions=tuple(fractions),
        bare_values=tuple(bare_values),
        time_points=tuple(time_points),
    )


def _checked(spec: ChartSpec) -> ChartSpec | None:
    return spec if not validate_chart(spec) else None


def _bar_series(parse: NumericParse, out_of_first: bool) -> tuple[tuple[str, float], ...] | None:
    """Best two-plus-entity series for a bar chart.

    Difference statements prefer the part/whole pair; value and rank
    statements prefer the individually labeled numbers.
    """
    out_of = None
    if parse.out_of_pairs:
        (part, whole), (part_label, whole_label) = parse.out_of_pairs[0], parse.out_of_labels[0]
        out_of = ((part_label, part), (whole_label, whole))
    bare = tuple(parse.bare_values) if len(parse.bare_values) >= 2 else None
    percents = (
        tuple((f"part {i + 1}", p) for i, p in enumerate(parse.percentages))
        if len(parse.percentages) >= 2
        else None
    )
    ordered = (out_of, bare, percents) if out_of_first else (bare, out_of, percents)
    for candidate in ordered:
        if candidate:
            return candidate
    return None


def map_insight_to_chart(insight: DataInsightKind, parse: NumericParse) -> ChartSpec | None:
    """Pick an eligible chart for the insight, or None when nothing fits.

    Total and pure: any (insight, parse) pair yields either a spec that
    passes chart validation or None.
    """
    if insight is DataInsightKind.PROPORTION:
        for num, den in parse.fractions:
            spec = _checked(ChartSpec(kind=ChartKind.PICTOGRAPH, fraction=(num, den)))
            if spec:
                return spec
        if len(parse.percentages) == 1:
            spec = _checked(ChartSpec(kind=ChartKind.SINGLE_PIE, single_value=parse.percentages[0]))
            if spec:
                return spec
        if len(parse.percentages) >= 2:
            series = tuple((f"part {i + 1}", p) for i, p in enumerate(parse.percentages))
            spec = _checked(ChartSpec(kind=ChartKind.PIE, series=series))
            if spec:
                return spec
        if parse.out_of_pairs:
            (part, whole) = parse.out_of_pairs[0]
            part_label, _ = parse.out_of_labels[0]
            if 0 <= part <= whole:
                series = ((part_label, part), ("remaining", whole - part))
                spec = _checked(ChartSpec(kind=ChartKind.PIE, series=series))
                if spec:
                    return spec
        if len(parse.bare_values) >= 2 and all(v >= 0 for _, v in parse.bare_values):
            spec = _checked(ChartSpec(kind=ChartKind.PIE, series=tuple(parse.bare_values)))
            if spec:
                return spec
        return None

    if insight in (DataInsightKind.DIFFERENCE, DataInsightKind.VALUE, DataInsightKind.RANK):
        # Comparison-first: a bar beats a pie whenever both would apply.
        series = _bar_series(parse, out_of_first=insight is DataInsightKind.DIFFERENCE)
        if series:
            return _checked(ChartSpec(kind=ChartKind.BAR, series=series))
        return None

    if insight is DataInsightKind.TREND:
        if len(parse.time_points) >= 3:
            ordered = tuple(sorted(parse.time_points, key=lambda tp: tp[0]))
            return _checked(ChartSpec(kind=ChartKind.LINE, series=ordered))
        return None

    return None


_UP_WORDS = re.compile(r"\b(increase[sd]?|ris(?:e|es|ing)|rose|grow(?:s|th|ing)?|grew|improve[sd]?|climb(?:s|ed)?|up)\b", re.I)
_DOWN_WORDS = re.compile(r"\b(decrease[sd]?|fall(?:s|ing)?|fell|declin(?:e|es|ed|ing)|drop(?:s|ped)?|shr(?:ink|ank)|down)\b", re.I)


def trend_direction_hint(text: str) -> str | None:
    """Metaphorical icon keyword for a qualitative trend with no usable numbers."""
    if _UP_WORDS.search(text):
        return "upward arrow"
    if _DOWN_WORDS.search(text):
        return "downward arrow"
    return None
