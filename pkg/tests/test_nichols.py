"""Test the Nichols chart mapping and its crossing counts."""

from __future__ import annotations

import numpy as np
import pytest

from crossings.const import (
    CHART_NICHOLS_MULTI,
    CHART_NICHOLS_SINGLE,
    KIND_CUSP_ZERO,
    KIND_REGULAR,
    MODE_MULTIPLE,
    MODE_SINGLE,
)
from crossings.fresponse import Crossing, detect_ray_crossings
from crossings.nichols import (
    critical_point_check,
    crossing_sum,
    detect_nichols_crossings,
    ray_phases,
    to_nichols,
    nichols_point,
    wrap_phase,
)

from .conftest import make_loop, mapped_curve


def test_wrap_phase() -> None:
    """Test phases fold into [-360, 0)."""
    wrapped = wrap_phase(np.array([-180.0, 0.0, -360.0, 180.0, -540.0, 720.0]))
    assert wrapped.tolist() == [-180.0, -360.0, -360.0, -180.0, -180.0, -360.0]


def test_nichols_point() -> None:
    """Test single points map to (phase, dB)."""
    assert nichols_point(-1 + 0j) == pytest.approx((-180.0, 0.0))
    assert nichols_point(1j) == pytest.approx((-270.0, 0.0))
    assert nichols_point(10 + 0j) == pytest.approx((-360.0, 20.0))


def test_single_mode_phase_range() -> None:
    """Test single-sheeted phases stay in [-360, 0)."""
    curve = to_nichols(mapped_curve(make_loop("unstable_poles", 5)), MODE_SINGLE)
    assert curve.chart == CHART_NICHOLS_SINGLE
    assert np.all(curve.phase_deg >= -360.0)
    assert np.all(curve.phase_deg < 0.0)
    assert ray_phases(curve) == [-180.0]


def test_multiple_mode_keeps_continuous_phase() -> None:
    """Test the multiple-sheeted chart draws every ray the phase spans."""
    curve = to_nichols(mapped_curve(make_loop("unstable_poles", 5)), MODE_MULTIPLE)
    assert curve.chart == CHART_NICHOLS_MULTI
    assert np.array_equal(curve.phase_deg, curve.continuous_phase)
    assert ray_phases(curve) == [-180.0, -540.0]


def test_rows_use_chart_phase() -> None:
    """Test export rows carry the wrapped phase in single mode."""
    curve = to_nichols(mapped_curve(make_loop("three_lags", 5)), MODE_SINGLE)
    rows = list(curve.rows())
    assert len(rows) == len(curve)
    assert all(-360.0 <= row["phase_deg"] < 0.0 for row in rows)


def test_unknown_mode() -> None:
    """Test an unknown chart mode is rejected."""
    with pytest.raises(ValueError):
        to_nichols(mapped_curve(make_loop("three_lags", 5)), "spiral")


@pytest.mark.parametrize(
    ("name", "gain"),
    [
        ("three_lags", 5),
        ("three_lags", 15),
        ("unstable_poles", 5),
        ("rhp_zero", 1.5),
        ("rhp_zero_unstable_poles", 1.5),
        ("integrator_rhp_zero", -5),
    ],
)
@pytest.mark.parametrize("mode", [MODE_SINGLE, MODE_MULTIPLE])
def test_nichols_sum_matches_nyquist(name: str, gain: float, mode: str) -> None:
    """Test both charts count the same as the complex plane."""
    source = mapped_curve(make_loop(name, gain))
    expected = sum(c.sign for c in detect_ray_crossings(source))
    crossings = detect_nichols_crossings(to_nichols(source, mode))
    assert crossing_sum(crossings) == expected


def test_regular_crossings_lie_above_zero_db() -> None:
    """Test reported crossings sit above 0 dB on the chart."""
    curve = to_nichols(mapped_curve(make_loop("three_lags", 15)), MODE_SINGLE)
    crossings = detect_nichols_crossings(curve)
    assert [c.sign for c in crossings] == [1, 1]
    for crossing in crossings:
        assert crossing.kind == KIND_REGULAR
        assert crossing.location == pytest.approx(20 * np.log10(1.5), abs=1e-2)


def test_half_chart() -> None:
    """Test the upper half keeps one of each conjugate pair."""
    curve = to_nichols(mapped_curve(make_loop("three_lags", 15)), MODE_SINGLE)
    half = detect_nichols_crossings(curve, half_chart=True)
    assert len(half) == 1
    assert half[0].point.imag > 0
    assert crossing_sum(half, half_chart=True) == 2


def test_half_chart_keeps_cusps() -> None:
    """Test self-conjugate events are counted once on the half chart."""
    curve = to_nichols(mapped_curve(make_loop("rhp_zero_unstable_poles", 1.5)), MODE_SINGLE)
    half = detect_nichols_crossings(curve, half_chart=True)
    assert KIND_CUSP_ZERO in [c.kind for c in half]
    assert crossing_sum(half, half_chart=True) == -1


def test_crossing_sum_weights() -> None:
    """Test half-chart weighting of regular and self-conjugate crossings."""
    regular = Crossing(0.4, 1.0, 3.0, 1, KIND_REGULAR, CHART_NICHOLS_SINGLE, 1j)
    cusp = Crossing(0.5, 0.0, 3.0, 1, KIND_CUSP_ZERO, CHART_NICHOLS_SINGLE, 0j, True)
    assert crossing_sum([regular, cusp]) == 2
    assert crossing_sum([regular, cusp], half_chart=True) == 3


def test_critical_point_check() -> None:
    """Test the critical box is found only on the marginal loop."""
    assert critical_point_check(to_nichols(mapped_curve(make_loop("three_lags", 5)))) is None
    hit = critical_point_check(to_nichols(mapped_curve(make_loop("three_lags", 10))))
    assert hit is not None
    assert 0.0 < hit < 1.0
