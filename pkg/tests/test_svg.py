"""Test SVG chart rendering."""

from __future__ import annotations

import pytest

from crossings.const import MODE_MULTIPLE, MODE_SINGLE
from crossings.fresponse import detect_ray_crossings
from crossings.nichols import detect_nichols_crossings, to_nichols
from crossings.svg import (
    PlotSeries,
    _esc,
    render_nichols_svg,
    render_nyquist_svg,
    tick_step,
    ticks,
)

from .conftest import make_loop, mapped_curve


def _nyquist_series(name: str, gain: float) -> PlotSeries:
    curve = mapped_curve(make_loop(name, gain))
    return PlotSeries(gain, curve, tuple(detect_ray_crossings(curve)))


def _nichols_series(name: str, gain: float, mode: str) -> PlotSeries:
    curve = to_nichols(mapped_curve(make_loop(name, gain)), mode)
    return PlotSeries(gain, curve, tuple(detect_nichols_crossings(curve)))


def test_tick_ladder() -> None:
    """Test the 1-2-5 spacing."""
    assert tick_step(10) == pytest.approx(2.0)
    assert tick_step(1) == pytest.approx(0.2)
    assert tick_step(30) == pytest.approx(5.0)
    assert tick_step(0) == 1.0
    assert ticks(0, 10) == [0, 2, 4, 6, 8, 10]


def test_escape() -> None:
    """Test XML escaping of labels."""
    assert _esc('a<b & "c">') == "a&lt;b &amp; &quot;c&quot;&gt;"
    assert _esc("") == ""


def test_nyquist_svg() -> None:
    """Test the Nyquist diagram marks the ray, -1 and each crossing."""
    svg = render_nyquist_svg([_nyquist_series("three_lags", 15)])
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count('class="crossing"') == 2
    assert svg.count('data-sign="+1"') == 2
    assert 'class="ray" data-phase="-180"' in svg
    assert svg.count('class="critical"') == 1
    assert 'data-gain="15"' in svg


def test_nyquist_svg_is_deterministic() -> None:
    """Test rendering twice gives identical bytes."""
    series = [_nyquist_series("three_lags", 15)]
    assert render_nyquist_svg(series) == render_nyquist_svg(series)


def test_nyquist_overlay() -> None:
    """Test several gains share one diagram."""
    svg = render_nyquist_svg([_nyquist_series("three_lags", 5), _nyquist_series("three_lags", 15)])
    assert 'data-gain="5"' in svg
    assert 'data-gain="15"' in svg
    assert svg.count('class="crossing"') == 2


def test_nichols_single_svg() -> None:
    """Test the single-sheeted chart draws one ray."""
    svg = render_nichols_svg([_nichols_series("three_lags", 15, MODE_SINGLE)])
    assert svg.count('class="ray"') == 1
    assert 'data-phase="-180"' in svg
    assert svg.count('class="crossing"') == 2


def test_nichols_multi_svg() -> None:
    """Test the multiple-sheeted chart draws every spanned ray."""
    series = [_nichols_series("unstable_poles", 5, MODE_MULTIPLE)]
    svg = render_nichols_svg(series, width=800, height=600)
    assert 'class="ray" data-phase="-180"' in svg
    assert 'class="ray" data-phase="-540"' in svg
    assert 'width="800" height="600"' in svg
    assert "<title>Nichols chart</title>" in svg
