"""Approximate text measurement from per-glyph width-to-height ratios.

The sizing equation needs text extents before any real font is loaded, so
widths come from a small ratio table: width(c) = ratio(c) * glyph_height.
The table ships as a versioned data file and can be swapped, as long as the
same table is used wherever byte-identical output matters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

GLYPH_TABLE_SCHEMA = "glyph-metrics/1"


@dataclass(frozen=True)
class GlyphMetrics:
    version: str
    ratios: dict[str, float]
    default_ratio: float

    def ratio(self, char: str) -> float:
        return self.ratios.get(char, self.default_ratio)

    def ratio_sum(self, text: str) -> float:
        return sum(self.ratio(c) for c in text)


class GlyphTableError(ValueError):
    pass


def load_glyph_metrics(raw: dict | None = None) -> GlyphMetrics:
    """Load the bundled ratio table, or build one from a parsed document."""
    if raw is None:
        path = resources.files("infoweave.data").joinpath("glyph_metrics.json")
        raw = json.loads(path.read_text(encoding="utf-8"))
    version = raw.get("schema_version")
    if version != GLYPH_TABLE_SCHEMA:
        raise GlyphTableError(f"unsupported glyph table version: {version!r} (expected {GLYPH_TABLE_SCHEMA})")
    ratios = {str(k): float(v) for k, v in raw.get("ratios", {}).items()}
    default = float(raw.get("default_ratio", 0.55))
    for char, ratio in list(ratios.items()) + [("default", default)]:
        if not (0.0 < ratio <= 2.0):
            raise GlyphTableError(f"ratio for {char!r} out of (0, 2]: {ratio}")
    return GlyphMetrics(version=version, ratios=ratios, default_ratio=default)


_DEFAULT: GlyphMetrics | None = None


def default_glyph_metrics() -> GlyphMetrics:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_glyph_metrics()
    return _DEFAULT


def text_width(text: str, glyph_height: float, metrics: GlyphMetrics | None = None) -> float:
    """Spatial length of `text` rendered at `glyph_height` pixels.

    Linear in glyph_height by construction: width = height * sum(ratios).
    """
    if glyph_height <= 0:
        raise ValueError(f"glyph_height must be positive, got {glyph_height}")
    metrics = metrics or default_glyph_metrics()
    return glyph_height * metrics.ratio_sum(text)
