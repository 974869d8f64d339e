"""Pluggable story-construction and suggestion providers.

Two implementations share one contract: a deterministic offline mock (pure
function of inputs and seed, used for tests and reproducible pipelines) and
an HTTP provider that talks to a chat-completion-style endpoint and treats
every malformed response as a contract violation rather than guessing.

The mock's heuristics are test scaffolding: they keep the pipeline
deterministic, they do not attempt real extraction quality.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from colorsys import hls_to_rgb
from dataclasses import dataclass
from importlib import resources

import httpx

from .model import (
    NarrativeRelationKind,
    PieceRelation,
    StoryFrame,
    StoryPiece,
    StoryUnit,
    Stylization,
    TextSpan,
    DataInsightKind,
    parse_insight_kind,
    parse_relation_kind,
    validate_frame,
)

MAX_PIECES = 10
MAX_UNITS = 4
MAX_SECONDARY_HIGHLIGHTS = 2

_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'-]*")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?%?")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")
_YEAR_RE = re.compile(r"\b[12]\d{3}\b")


class ProviderError(RuntimeError):
    """Transport-level provider failure (after retries), carrying the cause."""


class ContractViolationError(ProviderError):
    """The provider answered, but the payload breaks the contract."""


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"  # "mock" | "http"
    endpoint: str | None = None
    icon_endpoint: str | None = None
    api_key: str | None = None
    model_name: str | None = None
    timeout: float = 30.0
    max_retries: int = 2
    max_in_flight: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ValueError("http provider needs an endpoint")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class ExtractionResult:
    pieces: tuple[StoryPiece, ...]
    relations: tuple[PieceRelation, ...]


@dataclass(frozen=True)
class IconAsset:
    """Inline SVG markup sized to a 100x100 viewport, plus fallback provenance."""

    keyword: str
    markup: str
    fallback_reason: str | None = None


def _load_stopwords() -> frozenset[str]:
    text = resources.files("infoweave.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))


STOPWORDS = _load_stopwords()


def _words(text: str) -> list[str]:
    return [w.lower() for w in _WORD_RE.findall(text)]


def _content_words(text: str) -> set[str]:
    return {w for w in _words(text) if w not in STOPWORDS}


def _sentences(text: str) -> list[str]:
    # Source lines wrap mid-sentence; collapse internal whitespace runs.
    return [re.sub(r"\s+", " ", s).strip() for s in _SENTENCE_SPLIT_RE.split(text) if s.strip()]


def _digest(*parts: object) -> int:
    payload = "␟".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


class MockProvider:
    """Deterministic provider: same inputs and seed, byte-identical output."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    # - story segmentation -

    def segment_story(self, text: str, goal: str) -> ExtractionResult:
        if not text.strip():
            raise ValueError("source text is empty")
        if not goal.strip():
            raise ValueError("story goal is empty")

        paragraphs = [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]
        candidates = paragraphs if len(paragraphs) >= 2 else _sentences(text)
        if not candidates:
            candidates = [text.strip()]

        goal_words = _content_words(goal)
        scored = [(len(goal_words & _content_words(c)), i, c) for i, c in enumerate(candidates)]
        if len(scored) > MAX_PIECES:
            keep = sorted(scored, key=lambda t: (-t[0], t[1]))[:MAX_PIECES]
            scored = sorted(keep, key=lambda t: t[1])

        pieces = []
        for ordinal, (_, _, content) in enumerate(scored, start=1):
            pieces.append(
                StoryPiece(
                    id=f"sp-{ordinal}",
                    subtitle=self._subtitle(content),
                    content=content,
                    relation_to_goal=self._relation_to_goal(content),
                    units=(),
                )
            )
        return ExtractionResult(pieces=tuple(pieces), relations=tuple(self._relations(pieces)))

    @staticmethod
    def _subtitle(content: str) -> str:
        first = _SENTENCE_SPLIT_RE.split(content, maxsplit=1)[0]
        words = first.strip().rstrip(".!?").split()
        return " ".join(words[:8])

    @staticmethod
    def _relation_to_goal(content: str) -> NarrativeRelationKind:
        lowered = content.lower()
        if re.search(r"\b(because|cause[sd]?|therefore|led to|due to)\b", lowered):
            return NarrativeRelationKind.CAUSE_EFFECT
        if re.search(r"\b(but|however|although|whereas|in contrast)\b", lowered):
            return NarrativeRelationKind.CONTRAST
        if _YEAR_RE.search(content):
            return NarrativeRelationKind.TEMPORAL
        if re.search(r"\b(overall|in general|in summary|altogether)\b", lowered):
            return NarrativeRelationKind.GENERALIZATION
        return NarrativeRelationKind.EXAMPLE

    @staticmethod
    def _relations(pieces: list[StoryPiece]) -> list[PieceRelation]:
        relations = []
        for earlier, later in zip(pieces, pieces[1:]):
            shared = _content_words(earlier.content) & _content_words(later.content)
            if len(shared) >= 2:
                relations.append(
                    PieceRelation(from_id=earlier.id, to_id=later.id, kind=NarrativeRelationKind.SIMILARITY)
                )
            year_a = _YEAR_RE.search(earlier.content)
            year_b = _YEAR_RE.search(later.content)
            if year_a and year_b and int(year_a.group(0)) < int(year_b.group(0)):
                relations.append(
                    PieceRelation(from_id=earlier.id, to_id=later.id, kind=NarrativeRelationKind.TEMPORAL)
                )
        return relations

    # - unit extraction -

    def extract_units(self, piece: StoryPiece) -> tuple[StoryUnit, ...]:
        if not piece.content.strip():
            raise ValueError("piece content is empty")
        units = []
        for ordinal, sentence in enumerate(_sentences(piece.content)[:MAX_UNITS], start=1):
            units.append(
                StoryUnit(
                    id=f"{piece.id}-su-{ordinal}",
                    text=sentence,
                    insight=self._insight(sentence),
                )
            )
        return tuple(units)

    @staticmethod
    def _insight(sentence: str) -> DataInsightKind:
        if re.search(r"\d[\d,.]*\s+(?:\w+\s+){0,4}out of\s+\d", sentence):
            return DataInsightKind.DIFFERENCE
        if "%" in sentence:
            return DataInsightKind.PROPORTION
        if re.search(r"\d", sentence):
            return DataInsightKind.VALUE
        return DataInsightKind.TEXTUAL_STATEMENT

    # - visual suggestions -

    def suggest_highlights(self, unit: StoryUnit) -> tuple[TextSpan | None, tuple[TextSpan, ...]]:
        if not unit.text:
            raise ValueError("unit text is empty")
        numbers = list(_NUMBER_RE.finditer(unit.text))
        if not numbers:
            return None, ()
        primary = TextSpan(numbers[0].start(), numbers[0].end())
        secondary = []
        for match in numbers[1 : 1 + MAX_SECONDARY_HIGHLIGHTS]:
            end = match.end()
            rest = unit.text[end:]
            offset = 0
            for _ in range(2):  # numeral plus up to two following words
                m = re.match(r"\s+[A-Za-z][A-Za-z'-]*", rest[offset:])
                if not m:
                    break
                offset += m.end()
            secondary.append(TextSpan(match.start(), end + offset))
        return primary, tuple(secondary)

    def suggest_icon_keyword(self, unit: StoryUnit) -> str | None:
        counts: dict[str, int] = {}
        first_seen: dict[str, int] = {}
        for position, word in enumerate(_words(unit.text)):
            if word in STOPWORDS:
                continue
            counts[word] = counts.get(word, 0) + 1
            first_seen.setdefault(word, position)
        if not counts:
            return None
        return min(counts, key=lambda w: (-counts[w], first_seen[w]))

    def suggest_stylization(self, frame_summary: str, seed: int | None = None) -> Stylization:
        if not frame_summary.strip():
            raise ValueError("frame summary is empty")
        seed = self.config.seed if seed is None else seed
        hue = _digest("palette", seed, frame_summary) % 360

        def hex_color(h: float, lightness: float, saturation: float) -> str:
            r, g, b = hls_to_rgb((h % 360) / 360.0, lightness, saturation)
            return "#{:02X}{:02X}{:02X}".format(round(r * 255), round(g * 255), round(b * 255))

        theme = (
            hex_color(hue, 0.42, 0.58),
            hex_color(hue + 28, 0.55, 0.52),
            hex_color(hue + 185, 0.50, 0.45),
            hex_color(hue + 212, 0.32, 0.40),
        )
        return Stylization(
            theme_colors=theme,
            background=hex_color(hue, 0.96, 0.30),
            fonts={"title": "Georgia", "subtitle": "Trebuchet MS", "highlight": "Georgia", "regular": "Verdana"},
            text_colors={"primary_highlight": "#C0272D", "secondary_highlight": "#1C1C1C", "regular": "#333333"},
        )

    def fetch_icon(self, keyword: str, stylization: Stylization) -> IconAsset:
        if not keyword:
            raise ValueError("icon keyword is empty")
        return placeholder_icon(keyword, stylization)


def placeholder_icon(keyword: str, stylization: Stylization, fallback_reason: str | None = None) -> IconAsset:
    """Initial-in-a-circle glyph tinted with the first theme color."""
    color = stylization.theme_colors[0]
    initial = keyword.strip()[:1].upper() or "?"
    markup = (
        f'<circle cx="50" cy="50" r="46" fill="{color}"/>'
        f'<text x="50" y="66" font-size="48" text-anchor="middle" fill="#FFFFFF" '
        f'font-family="Verdana">{initial}</text>'
    )
    return IconAsset(keyword=keyword, markup=markup, fallback_reason=fallback_reason)


# --- HTTP provider -------------------------------------------------------------

_SEGMENT_INSTRUCTION = (
    "Segment the source text into 1-10 story pieces answering the goal. "
    "Label each piece's relation to the goal and any pairwise relations using: "
    + ", ".join(k.value for k in NarrativeRelationKind)
    + ". Respond with JSON: {\"pieces\": [{\"id\", \"subtitle\", \"content\", \"relation_to_goal\"}], "
    '"relations": [{"from_id", "to_id", "kind"}]}.'
)

_UNITS_INSTRUCTION = (
    "Extract 1-4 story units (one data insight each) from the story piece. Insight kinds: "
    + ", ".join(k.value for k in DataInsightKind)
    + '. Respond with JSON: {"units": [{"text", "insight"}]}.'
)

_HIGHLIGHT_INSTRUCTION = (
    "Pick the most critical number or superlative as the primary highlight and up to two "
    'contextual spans as secondary highlights. Respond with JSON: {"primary": {"start", "end"} | null, '
    '"secondary": [{"start", "end"}]}. Offsets index characters of the given text.'
)

_ICON_INSTRUCTION = 'Suggest one noun semantically related to the story unit. Respond with JSON: {"keyword": "..." | null}.'

_STYLE_INSTRUCTION = (
    "Recommend 3-5 theme colors, one background color (all #RRGGBB), fonts for title/subtitle/"
    "highlight/regular, and text colors for primary_highlight/secondary_highlight/regular. "
    'Respond with JSON: {"theme_colors": [...], "background", "fonts": {...}, "text_colors": {...}}.'
)


class HttpProvider:
    """Chat-completion-backed provider with bounded retries and concurrency."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        if config.kind != "http":
            raise ValueError("HttpProvider needs a config with kind='http'")
        self.config = config
        self._gate = threading.Semaphore(config.max_in_flight)
        headers = {"content-type": "application/json"}
        if config.api_key:
            headers["authorization"] = f"Bearer {config.api_key}"
        self._client = httpx.Client(timeout=config.timeout, headers=headers, transport=transport)

    def close(self) -> None:
        self._client.close()

    def _call(self, instruction: str, payload: dict) -> dict:
        body = {
            "model": self.config.model_name or "default",
            "messages": [
                {"role": "system", "content": instruction},
                {"role": "user", "content": json.dumps(payload, ensure_ascii=False)},
            ],
        }
        last_error: Exception | None = None
        for _ in range(self.config.max_retries + 1):
            try:
                with self._gate:
                    response = self._client.post(self.config.endpoint, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise ProviderError(f"provider returned status {response.status_code}")
            return self._parse_content(response)
        raise ProviderError(f"provider unreachable after {self.config.max_retries + 1} attempts") from last_error

    @staticmethod
    def _parse_content(response: httpx.Response) -> dict:
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
            parsed = json.loads(content)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ContractViolationError(f"malformed provider response: {exc}") from exc
        if not isinstance(parsed, dict):
            raise ContractViolationError("provider content is not a JSON object")
        return parsed

    def segment_story(self, text: str, goal: str) -> ExtractionResult:
        if not text.strip() or not goal.strip():
            raise ValueError("text and goal must be non-empty")
        raw = self._call(_SEGMENT_INSTRUCTION, {"text": text, "goal": goal})
        try:
            pieces = tuple(
                StoryPiece(
                    id=str(p["id"]),
                    subtitle=str(p.get("subtitle", "")),
                    content=str(p["content"]),
                    relation_to_goal=parse_relation_kind(str(p["relation_to_goal"])),
                    units=(),
                )
                for p in raw["pieces"]
            )
            relations = tuple(
                PieceRelation(
                    from_id=str(r["from_id"]), to_id=str(r["to_id"]), kind=parse_relation_kind(str(r["kind"]))
                )
                for r in raw.get("relations", [])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolationError(f"segmentation payload invalid: {exc}") from exc

        result = ExtractionResult(pieces=pieces, relations=relations)
        _check_extraction(result, goal)
        return result

    def extract_units(self, piece: StoryPiece) -> tuple[StoryUnit, ...]:
        raw = self._call(_UNITS_INSTRUCTION, {"content": piece.content})
        try:
            units = tuple(
                StoryUnit(
                    id=f"{piece.id}-su-{i + 1}",
                    text=str(u["text"]),
                    insight=parse_insight_kind(str(u["insight"])),
                )
                for i, u in enumerate(raw["units"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolationError(f"unit payload invalid: {exc}") from exc
        if not (1 <= len(units) <= MAX_UNITS) or any(not u.text for u in units):
            raise ContractViolationError(f"expected 1-{MAX_UNITS} non-empty units, got {len(units)}")
        return units

    def suggest_highlights(self, unit: StoryUnit) -> tuple[TextSpan | None, tuple[TextSpan, ...]]:
        raw = self._call(_HIGHLIGHT_INSTRUCTION, {"text": unit.text})

        def to_span(entry: object) -> TextSpan:
            if not isinstance(entry, dict):
                raise ContractViolationError("span must be an object")
            span = TextSpan(int(entry["start"]), int(entry["end"]))
            if not (0 <= span.start < span.end <= len(unit.text)):
                raise ContractViolationError(f"span [{span.start}, {span.end}) out of range")
            return span

        try:
            primary = to_span(raw["primary"]) if raw.get("primary") is not None else None
            secondary = tuple(to_span(e) for e in raw.get("secondary", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolationError(f"highlight payload invalid: {exc}") from exc
        spans = ([primary] if primary else []) + list(secondary)
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                if spans[i].overlaps(spans[j]):
                    raise ContractViolationError("highlight spans overlap")
        return primary, secondary

    def suggest_icon_keyword(self, unit: StoryUnit) -> str | None:
        raw = self._call(_ICON_INSTRUCTION, {"text": unit.text})
        keyword = raw.get("keyword")
        if keyword is None:
            return None
        if not isinstance(keyword, str):
            raise ContractViolationError("keyword must be a string or null")
        return keyword or None

    def suggest_stylization(self, frame_summary: str, seed: int | None = None) -> Stylization:
        raw = self._call(_STYLE_INSTRUCTION, {"summary": frame_summary})
        try:
            style = Stylization(
                theme_colors=tuple(str(c) for c in raw["theme_colors"]),
                background=str(raw["background"]),
                fonts={str(k): str(v) for k, v in raw["fonts"].items()},
                text_colors={str(k): str(v) for k, v in raw["text_colors"].items()},
            )
        except (KeyError, TypeError) as exc:
            raise ContractViolationError(f"stylization payload invalid: {exc}") from exc
        _check_stylization(style)
        return style

    def fetch_icon(self, keyword: str, stylization: Stylization) -> IconAsset:
        if not keyword:
            raise ValueError("icon keyword is empty")
        if not self.config.icon_endpoint:
            return placeholder_icon(keyword, stylization, fallback_reason="no icon endpoint configured")
        try:
            response = self._client.get(
                self.config.icon_endpoint,
                params={"keyword": keyword, "color": stylization.theme_colors[0]},
            )
            if response.status_code != 200 or not response.text.strip():
                return placeholder_icon(
                    keyword, stylization, fallback_reason=f"icon service status {response.status_code}"
                )
            return IconAsset(keyword=keyword, markup=response.text)
        except httpx.HTTPError as exc:
            return placeholder_icon(keyword, stylization, fallback_reason=f"icon service failure: {exc}")


def _check_extraction(result: ExtractionResult, goal: str) -> None:
    """Reject any provider output that would not validate as a frame."""
    probe = StoryFrame(
        goal=goal,
        title=goal,
        pieces=result.pieces,
        relations=result.relations,
        stylization=_PROBE_STYLE,
    )
    violations = validate_frame(probe, allow_empty_units=True)
    if violations:
        raise ContractViolationError(f"extraction violates the story model: {violations[0]}")


def _check_stylization(style: Stylization) -> None:
    probe = StoryFrame(
        goal="probe",
        title="probe",
        pieces=(
            StoryPiece(
                id="sp-probe",
                subtitle="probe",
                content="probe",
                relation_to_goal=NarrativeRelationKind.EXAMPLE,
                units=(StoryUnit(id="su-probe", text="probe", insight=DataInsightKind.TEXTUAL_STATEMENT),),
            ),
        ),
        relations=(),
        stylization=style,
    )
    violations = [v for v in validate_frame(probe) if v.path.startswith("stylization")]
    if violations:
        raise ContractViolationError(f"stylization invalid: {violations[0]}")


_PROBE_STYLE = Stylization(
    theme_colors=("#336699", "#6699CC", "#99CCFF"),
    background="#FFFFFF",
    fonts={"title": "Georgia", "subtitle": "Georgia", "highlight": "Georgia", "regular": "Verdana"},
    text_colors={"primary_highlight": "#C0272D", "secondary_highlight": "#1C1C1C", "regular": "#333333"},
)


Provider = MockProvider | HttpProvider


def make_provider(config: ProviderConfig, transport: httpx.BaseTransport | None = None) -> Provider:
    if config.kind == "mock":
        return MockProvider(config)
    return HttpProvider(config, transport=transport)
