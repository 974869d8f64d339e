"""Text measurement: table loading and the linearity contract."""

from __future__ import annotations

import random

import pytest

from infoweave.glyphs import GlyphMetrics, GlyphTableError, default_glyph_metrics, load_glyph_metrics, text_width


def test_empty_text_is_zero_width():
    assert text_width("", 10.0) == 0.0


def test_uniform_ratio_example():
    metrics = GlyphMetrics(version="glyph-metrics/1", ratios={}, default_ratio=0.55)
    assert text_width("aa", 10.0, metrics) == pytest.approx(11.0)


def test_homogeneity_in_glyph_height():
    rng = random.Random(5)
    metrics = default_glyph_metrics()
    alphabet = "abc XYZ 0189.,!?"
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
        h = rng.uniform(0.5, 60.0)
        assert text_width(text, 2 * h, metrics) == pytest.approx(2 * text_width(text, h, metrics), rel=1e-12)


def test_nonpositive_height_rejected():
    with pytest.raises(ValueError):
        text_width("a", 0.0)


def test_bundled_table_declares_version():
    metrics = default_glyph_metrics()
    assert metrics.version == "glyph-metrics/1"
    assert 0 < metrics.default_ratio <= 2
    assert metrics.ratio(" ") < metrics.ratio("a")


def test_unknown_table_version_rejected():
    with pytest.raises(GlyphTableError):
        load_glyph_metrics({"schema_version": "glyph-metrics/99", "ratios": {}, "default_ratio": 0.5})


def test_out_of_range_ratio_rejected():
    with pytest.raises(GlyphTableError):
        load_glyph_metrics({"schema_version": "glyph-metrics/1", "ratios": {"a": 3.0}, "default_ratio": 0.5})
