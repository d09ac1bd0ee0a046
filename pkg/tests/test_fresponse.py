"""Test frequency response mapping, ray crossings and winding numbers."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from crossings.const import KIND_CUSP_INFINITY, KIND_CUSP_ZERO, KIND_REGULAR, SEGMENT_AXIS
from crossings.exceptions import CriticalPointHit, PoleProximity, WindingNotInteger
from crossings.fresponse import (
    cusp_sign,
    detect_ray_crossings,
    evaluate,
    loop_phase,
    winding_number,
)
from crossings.tflang import parse_tf

from .conftest import make_loop, mapped_curve


def _regular(crossings):
    return [c for c in crossings if c.kind == KIND_REGULAR]


def test_evaluate_at_zero_frequency() -> None:
    """Test the DC value and its magnitude in dB."""
    value, mag_db = evaluate(make_loop("three_lags", 5), np.array([0j]))
    assert value[0] == 5 + 0j
    assert mag_db[0] == pytest.approx(20 * math.log10(5))


def test_evaluate_on_pole_raises() -> None:
    """Test a sample on a pole is refused."""
    with pytest.raises(PoleProximity):
        evaluate(make_loop("three_lags", 5), np.array([-1 + 0j]))


def test_phase_of_unstable_poles_at_zero_frequency() -> None:
    """Test enclosed poles contribute 180 degrees each at omega=0."""
    phase = loop_phase(make_loop("unstable_poles", 5), np.array([0j]), np.array([False]))
    assert phase[0] == pytest.approx(-360.0)


def test_phase_at_real_axis_crossing() -> None:
    """Test the phase condition at omega = sqrt(11)."""
    s = np.array([1j * math.sqrt(11)])
    phase = loop_phase(make_loop("three_lags", 5), s, np.array([False]))
    assert phase[0] == pytest.approx(-180.0)


def test_curve_rows() -> None:
    """Test export rows carry omega only on the imaginary axis."""
    curve = mapped_curve(make_loop("three_lags", 5))
    rows = list(curve.rows())
    assert len(rows) == len(curve)
    assert rows[0]["segment"] == "axis"
    assert rows[-1]["segment"] == "arc"
    assert rows[-1]["omega"] is None
    assert np.isnan(curve.omega[-1])
    zero = next(row for row in rows if row["omega"] == 0.0)
    assert zero["re"] == 5.0 and zero["im"] == 0.0


def test_stable_loop_has_no_crossings() -> None:
    """Test the three-lag loop at K=5 never reaches the ray."""
    assert detect_ray_crossings(mapped_curve(make_loop("three_lags", 5))) == []


@pytest.mark.parametrize(
    ("name", "gain", "location", "omega"),
    [
        ("three_lags", 15, -1.5, math.sqrt(11)),
        ("rhp_zero_unstable_poles", 1.5, -3.6, math.sqrt(3.5)),
        ("integrator", 5, -2.0, 1.0),
        ("integrator_rhp_zero", -5, -2.5, math.sqrt(2)),
    ],
)
def test_crossing_locations(name: str, gain: float, location: float, omega: float) -> None:
    """Test regular crossings land where the phase condition puts them."""
    crossings = _regular(detect_ray_crossings(mapped_curve(make_loop(name, gain))))
    assert len(crossings) == 2
    assert sorted(c.omega for c in crossings) == pytest.approx([-omega, omega], abs=5e-3)
    for crossing in crossings:
        assert crossing.location == pytest.approx(location, abs=1e-2)
    assert crossings[0].t < crossings[1].t


@pytest.mark.parametrize(
    ("name", "gain", "total"),
    [
        ("three_lags", 15, 2),
        ("rhp_zero_unstable_poles", 0.5, -2),
        ("rhp_zero_unstable_poles", 1.5, -1),
        ("integrator", 5, 2),
        ("integrator_rhp_zero", -5, 2),
    ],
)
def test_crossing_sums(name: str, gain: float, total: int) -> None:
    """Test signed crossing sums."""
    crossings = detect_ray_crossings(mapped_curve(make_loop(name, gain)))
    assert sum(c.sign for c in crossings) == total


def test_cusp_at_zero_frequency() -> None:
    """Test the omega=0 cusp of the RHP-zero loop counts once, upward."""
    tf = make_loop("rhp_zero", 1.5)
    crossings = detect_ray_crossings(mapped_curve(tf))
    cusps = [c for c in crossings if c.kind == KIND_CUSP_ZERO]
    assert len(cusps) == 1
    assert cusps[0].sign == 1
    assert cusps[0].omega == 0.0
    assert cusps[0].location == pytest.approx(-1.5)
    assert sum(c.sign for c in crossings) == 1
    assert cusp_sign(tf, "zero") == 1


def test_dropping_cusp_handler_breaks_the_count() -> None:
    """Test the omega=0 event is what makes the RHP-zero loop count +1."""
    curve = mapped_curve(make_loop("rhp_zero", 1.5))
    crossings = detect_ray_crossings(curve, cusp_handler=None)
    assert all(c.kind == KIND_REGULAR for c in crossings)
    assert sum(c.sign for c in crossings) != 1


def test_cusp_with_regular_crossings() -> None:
    """Test the omega=0 event next to two regular crossings."""
    crossings = detect_ray_crossings(mapped_curve(make_loop("rhp_zero_unstable_poles", 1.5)))
    cusps = [c for c in crossings if c.kind == KIND_CUSP_ZERO]
    assert len(cusps) == 1
    assert cusps[0].sign == 1
    assert cusps[0].location == pytest.approx(-1.5)
    assert [c.sign for c in _regular(crossings)] == [-1, -1]


def test_cusp_at_infinity() -> None:
    """Test a biproper loop ending on the ray counts at infinity."""
    tf = parse_tf("-2*(s+1)/(s+3)")
    assert cusp_sign(tf, "infinity") == 1
    crossings = detect_ray_crossings(mapped_curve(tf))
    assert [c.kind for c in crossings] == [KIND_CUSP_INFINITY]
    assert crossings[0].location == pytest.approx(-2.0)
    assert winding_number(mapped_curve(tf)) == 1


def test_cusp_sign_not_applicable() -> None:
    """Test cusp_sign reports 0 off the ray."""
    tf = make_loop("three_lags", 5)
    assert cusp_sign(tf, "zero") == 0
    assert cusp_sign(tf, "infinity") == 0


@pytest.mark.parametrize(
    ("name", "gain", "winding"),
    [
        ("three_lags", 5, 0),
        ("three_lags", 15, 2),
        ("unstable_poles", 5, -2),
        ("integrator", 5, 2),
        ("rhp_zero", 1.5, 1),
    ],
)
def test_winding_number(name: str, gain: float, winding: int) -> None:
    """Test clockwise encirclements of -1."""
    assert winding_number(mapped_curve(make_loop(name, gain))) == winding


def test_winding_number_of_open_curve() -> None:
    """Test a curve cut at a ray crossing has no whole number of turns."""
    curve = mapped_curve(make_loop("three_lags", 15))
    contour = curve.contour
    on_axis = contour.kinds == SEGMENT_AXIS
    cut = int(np.argmax(on_axis & (contour.s.imag >= math.sqrt(11)))) + 1
    part = replace(
        contour,
        s=contour.s[:cut],
        t=contour.t[:cut],
        u=contour.u[:cut],
        segment_index=contour.segment_index[:cut],
    )
    open_curve = replace(
        curve,
        contour=part,
        value=curve.value[:cut],
        mag_db=curve.mag_db[:cut],
        phase_deg=curve.phase_deg[:cut],
    )
    with pytest.raises(WindingNotInteger) as err:
        winding_number(open_curve)
    assert abs(err.value.turns - round(err.value.turns)) > 0.25


def test_critical_point_hit() -> None:
    """Test the curve through -1 is refused."""
    curve = mapped_curve(make_loop("three_lags", 10))
    with pytest.raises(CriticalPointHit):
        detect_ray_crossings(curve)
