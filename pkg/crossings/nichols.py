"""Nichols chart: the (phase, dB) map, ray crossings and critical points."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from .const import (
    CHART_NICHOLS_MULTI,
    CHART_NICHOLS_SINGLE,
    DEFAULT_TOL_DB,
    DEFAULT_TOL_DEG,
    KIND_REGULAR,
    MODE_MULTIPLE,
    MODE_SINGLE,
    RAY_PHASE,
    SEGMENT_ARC,
    SEGMENT_AXIS,
)
from .contour import Segment
from .exceptions import CriticalPointHit
from .fresponse import (
    Crossing,
    CuspHandler,
    MappedCurve,
    bisect_interval,
    cusp_events,
    cusp_sign,
    evaluate,
    loop_phase,
)
from .tflang import FactoredTF

_LOGGER = logging.getLogger(__name__)

UPPER_HALF_TOL = 1e-9


def wrap_phase(phase: np.ndarray | float) -> np.ndarray:
    """Shift phases by multiples of 360 degrees into [-360, 0)."""
    wrapped = np.mod(np.asarray(phase, dtype=float), 360.0) - 360.0
    return np.where(wrapped >= 0.0, -360.0, wrapped)


def nichols_point(value: complex) -> tuple[float, float]:
    """Map a complex-plane point to (phase in [-360, 0), magnitude in dB)."""
    phase = float(wrap_phase(np.degrees(np.angle(value))))
    with np.errstate(divide="ignore"):
        mag_db = float(20 * np.log10(abs(value)))
    return phase, mag_db


def _sheet(phase: np.ndarray) -> np.ndarray:
    """Index of the gap between rays that each phase lies in."""
    return np.floor((phase - RAY_PHASE) / 360.0).astype(int)


@dataclass(frozen=True, eq=False)
class NicholsCurve:
    """Nichols-chart samples; phase_deg is wrapped in single mode."""

    source: MappedCurve
    phase_deg: np.ndarray
    mode: str

    def __len__(self) -> int:
        return len(self.phase_deg)

    @property
    def t(self) -> np.ndarray:
        return self.source.t

    @property
    def omega(self) -> np.ndarray:
        return self.source.omega

    @property
    def mag_db(self) -> np.ndarray:
        return self.source.mag_db

    @property
    def continuous_phase(self) -> np.ndarray:
        """Return the multiple-sheeted phase regardless of mode."""
        return self.source.phase_deg

    @property
    def chart(self) -> str:
        return CHART_NICHOLS_SINGLE if self.mode == MODE_SINGLE else CHART_NICHOLS_MULTI

    def rows(self) -> Iterator[dict[str, object]]:
        """Yield export rows with the phase of this chart."""
        for row, phase in zip(self.source.rows(), self.phase_deg, strict=True):
            row["phase_deg"] = float(phase)
            yield row


def to_nichols(curve: MappedCurve, mode: str = MODE_SINGLE) -> NicholsCurve:
    """Project a mapped curve onto the single- or multiple-sheeted chart."""
    if mode == MODE_SINGLE:
        phase = wrap_phase(curve.phase_deg)
    elif mode == MODE_MULTIPLE:
        phase = curve.phase_deg.copy()
    else:
        raise ValueError(f"unknown Nichols mode {mode!r}")
    return NicholsCurve(source=curve, phase_deg=phase, mode=mode)


def ray_phases(curve: NicholsCurve) -> list[float]:
    """Return the ray phases to draw: -180 single, every 180+360k spanned otherwise."""
    if curve.mode == MODE_SINGLE:
        return [-RAY_PHASE]
    phase = curve.continuous_phase
    low = int(np.ceil((phase.min() - RAY_PHASE) / 360.0))
    high = int(np.floor((phase.max() - RAY_PHASE) / 360.0))
    return [RAY_PHASE + 360.0 * k for k in range(high, low - 1, -1)]


def _phase_side(tf: FactoredTF, ray: float) -> Callable[[Segment, np.ndarray], bool]:
    def side(segment: Segment, point: np.ndarray) -> bool:
        on_arc = np.array([segment.kind == SEGMENT_ARC])
        return bool(loop_phase(tf, point, on_arc)[0] >= ray)

    return side


def _ray_passes(
    curve: NicholsCurve, excluded: set[int]
) -> Iterator[tuple[int, float, complex, int]]:
    """Yield (interval, t, point, sign) for every ray passed between samples."""
    source = curve.source
    sheets = _sheet(curve.continuous_phase)
    for index in np.nonzero(sheets[:-1] != sheets[1:])[0]:
        index = int(index)
        if index in excluded:
            continue
        before, after = int(sheets[index]), int(sheets[index + 1])
        sign = 1 if after < before else -1
        for sheet in range(min(before, after) + 1, max(before, after) + 1):
            ray = RAY_PHASE + 360.0 * sheet
            t_star, point = bisect_interval(
                source.contour, index, _phase_side(source.tf, ray)
            )
            yield index, t_star, point, sign


def _mag_db_at(tf: FactoredTF, point: complex) -> float:
    return float(evaluate(tf, np.array([point]))[1][0])


def detect_nichols_crossings(
    curve: NicholsCurve,
    tol_db: float = DEFAULT_TOL_DB,
    cusp_handler: CuspHandler | None = cusp_sign,
    half_chart: bool = False,
) -> list[Crossing]:
    """Detect signed crossings of the 180+360k rays above 0 dB; leftward is positive.

    Detection runs on the continuous phase in both modes. With half_chart only
    crossings on the omega >= 0 half are returned (see crossing_sum).
    """
    source = curve.source
    critical = 10 ** (tol_db / 20) - 1
    excluded, crossings = cusp_events(source, curve.chart, critical, cusp_handler)

    for index, t_star, point, sign in _ray_passes(curve, excluded):
        mag = _mag_db_at(source.tf, point)
        if abs(mag) <= tol_db:
            raise CriticalPointHit(
                f"Nichols curve passes through a critical point at t={t_star:.9g}", t_star
            )
        if mag <= 0:
            continue
        segment = source.contour.segment_of(index)
        crossings.append(
            Crossing(
                t=t_star,
                omega=point.imag if segment.kind == SEGMENT_AXIS else None,
                location=mag,
                sign=sign,
                kind=KIND_REGULAR,
                chart=curve.chart,
                point=point,
                self_conjugate=abs(point.imag) <= UPPER_HALF_TOL * max(1.0, abs(point)),
            )
        )

    if half_chart:
        crossings = [
            c
            for c in crossings
            if c.self_conjugate or c.point.imag > 0
        ]
    crossings.sort(key=lambda c: c.t)
    _LOGGER.debug(
        "Found %s %s crossings (half chart %s)", len(crossings), curve.chart, half_chart
    )
    return crossings


def crossing_sum(crossings: Iterable[Crossing], half_chart: bool = False) -> int:
    """Sum crossing signs; on a half chart regular crossings stand for a conjugate pair."""
    total = 0
    for crossing in crossings:
        weight = 2 if half_chart and not crossing.self_conjugate else 1
        total += weight * crossing.sign
    return total


def critical_point_check(
    curve: NicholsCurve,
    tol_deg: float = DEFAULT_TOL_DEG,
    tol_db: float = DEFAULT_TOL_DB,
) -> float | None:
    """Return t of the first point within the (tol_deg, tol_db) box of a critical point."""
    phase = curve.continuous_phase
    offset = np.abs(np.mod(phase - RAY_PHASE + 180.0, 360.0) - 180.0)
    hits = np.nonzero((offset <= tol_deg) & (np.abs(curve.mag_db) <= tol_db))[0]
    first = float(curve.t[hits[0]]) if hits.size else None

    source = curve.source
    for _, t_star, point, _ in _ray_passes(curve, set()):
        if first is not None and t_star >= first:
            break
        if abs(_mag_db_at(source.tf, point)) <= tol_db:
            first = t_star
            break
    if first is not None:
        _LOGGER.debug("Critical point hit at t=%s", first)
    return first
