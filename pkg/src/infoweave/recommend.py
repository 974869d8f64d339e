"""Rule-based layout scoring and ranking.

Each rule in the bundled table awards +1 to one layout when its predicate over
the story metrics holds; layouts are ranked by total score with ties broken by
the canonical layout order. The firing list is kept as the explanation trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .model import LayoutKind, StoryMetrics, parse_layout_kind, parse_relation_kind

RULES_SCHEMA = "layout-rules/1"


class RuleTableError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    rule_id: str
    layout: LayoutKind
    predicate: dict
    note: str

    def fires(self, metrics: StoryMetrics) -> bool:
        return _evaluate(self.predicate, metrics)


@dataclass(frozen=True)
class RuleFiring:
    rule_id: str
    layout: LayoutKind
    increment: int = 1


@dataclass(frozen=True)
class LayoutRanking:
    scores: dict[LayoutKind, int]
    order: tuple[LayoutKind, ...]
    firings: tuple[RuleFiring, ...]

    @property
    def top(self) -> LayoutKind:
        return self.order[0]


def _metric_value(metrics: StoryMetrics, name: str) -> float:
    if name == "n_sp":
        return metrics.n_sp
    if name == "rho_su":
        return metrics.rho_su
    if name == "rho_rel":
        return metrics.rho_rel
    if name == "diversity":
        return sum(1 for count in metrics.relation_counts.values() if count > 0)
    if name == "max_ref":
        return max(metrics.ref) if metrics.ref else 0
    raise RuleTableError(f"unknown metric {name!r}")


def _evaluate(predicate: dict, metrics: StoryMetrics) -> bool:
    kind = predicate.get("kind")
    if kind == "metric_range":
        value = _metric_value(metrics, predicate["metric"])
        if "gt" in predicate and not value > predicate["gt"]:
            return False
        if "ge" in predicate and not value >= predicate["ge"]:
            return False
        if "lt" in predicate and not value < predicate["lt"]:
            return False
        if "le" in predicate and not value <= predicate["le"]:
            return False
        return True
    if kind == "goal_share_ge":
        total = sum(metrics.goal_relation_counts.values())
        if total == 0:
            return False
        hits = sum(
            metrics.goal_relation_counts.get(parse_relation_kind(name), 0) for name in predicate["relations"]
        )
        return hits / total >= predicate["threshold"]
    if kind == "modal_kind":
        counts = metrics.relation_counts if predicate["distribution"] == "all" else metrics.goal_relation_counts
        if not counts:
            return False
        target = parse_relation_kind(predicate["relation"])
        peak = max(counts.values())
        return peak > 0 and counts.get(target, 0) == peak
    raise RuleTableError(f"unknown predicate kind {kind!r}")


def load_rules(raw: dict | None = None) -> tuple[Rule, ...]:
    if raw is None:
        path = resources.files("infoweave.data").joinpath("layout_rules.json")
        raw = json.loads(path.read_text(encoding="utf-8"))
    version = raw.get("schema_version")
    if version != RULES_SCHEMA:
        raise RuleTableError(f"unsupported rule table version: {version!r} (expected {RULES_SCHEMA})")
    rules = []
    for row in raw["rules"]:
        rules.append(
            Rule(
                rule_id=row["rule_id"],
                layout=parse_layout_kind(row["layout"]),
                predicate=row["predicate"],
                note=row.get("note", ""),
            )
        )
    return tuple(rules)


_RULES: tuple[Rule, ...] | None = None


def default_rules() -> tuple[Rule, ...]:
    global _RULES
    if _RULES is None:
        _RULES = load_rules()
    return _RULES


def score_layouts(metrics: StoryMetrics, rules: tuple[Rule, ...] | None = None) -> LayoutRanking:
    """Score all six layouts for the given metrics and rank them.

    Deterministic: rules are evaluated in table order and ties are broken by
    the canonical layout order, so equal metrics always produce the same
    ranking and the same firing trace.
    """
    if metrics.n_sp < 1:
        raise ValueError("metrics must describe at least one story piece")
    rules = rules if rules is not None else default_rules()

    scores: dict[LayoutKind, int] = {kind: 0 for kind in LayoutKind}
    firings: list[RuleFiring] = []
    for rule in rules:
        if rule.fires(metrics):
            scores[rule.layout] += 1
            firings.append(RuleFiring(rule_id=rule.rule_id, layout=rule.layout))

    order = tuple(sorted(LayoutKind, key=lambda kind: (-scores[kind], kind.canonical_index)))
    return LayoutRanking(scores=scores, order=order, firings=tuple(firings))
