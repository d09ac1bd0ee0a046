"""Frequency response along the contour, ray crossings, cusp rule and winding."""

from __future__ import annotations

import functools
import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .const import (
    BISECTION_STEPS,
    CHART_COMPLEX,
    CUSP_LADDER_LENGTH,
    CUSP_NOISE_FLOOR,
    CUSP_STEP_FACTOR,
    DEFAULT_CRITICAL_TOL,
    KIND_CUSP_INFINITY,
    KIND_CUSP_ZERO,
    KIND_REGULAR,
    PROXIMITY_FLOOR,
    SEGMENT_ARC,
    SEGMENT_AXIS,
    WINDING_INTEGER_TOL,
    WINDING_MAX_DEPTH,
    WINDING_MAX_STEP_DEG,
)
from .contour import NyquistContour, Segment
from .exceptions import (
    CriticalPointHit,
    IndeterminateCrossing,
    PoleProximity,
    WindingNotInteger,
)
from .polycore import poly_eval
from .tflang import FactoredTF

_LOGGER = logging.getLogger(__name__)

CuspPoint = Literal["zero", "infinity"]
CuspHandler = Callable[[FactoredTF, CuspPoint], int]

SELF_CONJUGATE_TOL = 1e-9


@dataclass(frozen=True)
class Crossing:
    """One signed intersection of the curve with a ray."""

    t: float
    omega: float | None
    location: float
    sign: int
    kind: str
    chart: str
    point: complex = 0j
    self_conjugate: bool = False

    def as_dict(self) -> dict[str, object]:
        """Return the crossing fields used in reports."""
        return {
            "t": self.t,
            "omega": self.omega,
            "location": self.location,
            "sign": self.sign,
            "kind": self.kind,
        }


@dataclass(frozen=True, eq=False)
class MappedCurve:
    """Samples of L along the contour with continuous phase."""

    tf: FactoredTF
    contour: NyquistContour
    value: np.ndarray
    mag_db: np.ndarray
    phase_deg: np.ndarray

    def __len__(self) -> int:
        return len(self.value)

    @property
    def t(self) -> np.ndarray:
        """Return the contour parameter of every sample."""
        return self.contour.t

    @property
    def omega(self) -> np.ndarray:
        """Return frequencies, NaN off the imaginary axis."""
        on_axis = self.contour.kinds == SEGMENT_AXIS
        return np.where(on_axis, self.contour.s.imag, np.nan)

    def rows(self):
        """Yield one dictionary per sample."""
        kinds = self.contour.kinds
        omega = self.omega
        for i in range(len(self.value)):
            yield {
                "segment": str(kinds[i]),
                "t": float(self.contour.t[i]),
                "omega": None if np.isnan(omega[i]) else float(omega[i]),
                "re": float(self.value[i].real),
                "im": float(self.value[i].imag),
                "mag_db": float(self.mag_db[i]),
                "phase_deg": float(self.phase_deg[i]),
            }


@dataclass(frozen=True)
class _Geometry:
    gain_phase: float
    zeros: np.ndarray
    poles: np.ndarray


@functools.lru_cache(maxsize=256)
def _geometry(tf: FactoredTF) -> _Geometry:
    leading = tf.leading_gain
    return _Geometry(
        gain_phase=0.0 if leading >= 0 else 180.0,
        zeros=np.array(tf.zeros, dtype=complex),
        poles=np.array(tf.poles, dtype=complex),
    )


def _root_phases(roots: np.ndarray, s: np.ndarray, on_arc: np.ndarray) -> np.ndarray:
    """Sum of continuous arg(s - r) in degrees over the given roots."""
    total = np.zeros(s.shape, dtype=float)
    for root in roots:
        angle = np.degrees(np.angle(s - root))
        if root.real > 0:
            # enclosed root: [0, 360) branch until the arc passes below it
            wrapped = np.where(angle < 0, angle + 360.0, angle)
            principal = on_arc & (s.imag < root.imag)
            angle = np.where(principal, angle, wrapped)
        total += angle
    return total


def loop_phase(tf: FactoredTF, s: np.ndarray, on_arc: np.ndarray) -> np.ndarray:
    """Return the continuous (multiple-sheeted) phase of L at contour points."""
    s = np.asarray(s, dtype=complex)
    on_arc = np.broadcast_to(np.asarray(on_arc, dtype=bool), s.shape)
    geometry = _geometry(tf)
    return (
        geometry.gain_phase
        + _root_phases(geometry.zeros, s, on_arc)
        - _root_phases(geometry.poles, s, on_arc)
    )


def evaluate(tf: FactoredTF, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return L(s) and 20 log10 |L(s)| accumulated per factor."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        value = np.full(s.shape, tf.gain, dtype=complex)
        mag_db = np.full(s.shape, 20 * np.log10(abs(tf.gain)) if tf.gain else -np.inf)
        for factor in tf.zero_factors:
            term = poly_eval(factor, s)
            value = value * term
            mag_db = mag_db + 20 * np.log10(np.abs(term))
        denominators = [poly_eval(f, s) for f in tf.pole_factors]
        denominators.extend([s] * tf.integrator_order)
        for term in denominators:
            if np.any(np.abs(term) < PROXIMITY_FLOOR):
                raise PoleProximity(f"contour sample on a pole of {tf}")
            value = value / term
            mag_db = mag_db - 20 * np.log10(np.abs(term))
    return value, mag_db


def map_response(tf: FactoredTF, contour: NyquistContour) -> MappedCurve:
    """Map the contour through L with per-factor continuous phase."""
    value, mag_db = evaluate(tf, contour.s)
    phase = loop_phase(tf, contour.s, contour.on_arc)
    _LOGGER.debug(
        "Mapped %s samples, phase span [%.3f, %.3f] deg",
        len(value),
        float(phase.min()),
        float(phase.max()),
    )
    return MappedCurve(tf=tf, contour=contour, value=value, mag_db=mag_db, phase_deg=phase)


def bisect_interval(
    contour: NyquistContour,
    index: int,
    side: Callable[[Segment, np.ndarray], bool],
) -> tuple[float, complex]:
    """Bisect interval index on u until side() flips; return (t, s) of the flip."""
    segment = contour.segment_of(index)
    low = float(contour.u[index])
    high = float(contour.interval_end(index))
    low_side = side(segment, segment.point(np.array([low])))
    for _ in range(BISECTION_STEPS):
        mid = (low + high) / 2
        if mid in (low, high):
            break
        if side(segment, segment.point(np.array([mid]))) == low_side:
            low = mid
        else:
            high = mid
    u_star = (low + high) / 2
    point = complex(segment.point(np.array([u_star]))[0])
    return contour.t_at(index, u_star), point


def _is_self_conjugate(point: complex) -> bool:
    return abs(point.imag) <= SELF_CONJUGATE_TOL * max(1.0, abs(point))


def _has_roots(tf: FactoredTF) -> bool:
    return bool(tf.zeros or tf.poles)


def cusp_events(
    curve: MappedCurve,
    chart: str,
    tol: float,
    cusp_handler: CuspHandler | None,
) -> tuple[set[int], list[Crossing]]:
    """Find on-ray cusps at omega=0 and infinity.

    Returns the intervals regular detection must skip and the cusp events.
    """
    tf, contour = curve.tf, curve.contour
    excluded: set[int] = set()
    events: list[Crossing] = []
    if tf.is_zero or not _has_roots(tf):
        return excluded, events

    kinds = contour.kinds
    origin = np.nonzero((kinds == SEGMENT_AXIS) & (contour.s == 0))[0]
    if origin.size:
        i0 = int(origin[0])
        x0 = complex(curve.value[i0])
        if x0.imag == 0.0 and abs(x0 + 1) <= tol * (1 + abs(x0)):
            raise CriticalPointHit("L(0) is the critical point", float(contour.t[i0]))
        if x0.imag == 0.0 and x0.real < -1:
            excluded.update({i0 - 1, i0})
            if cusp_handler is not None:
                sign = cusp_handler(tf, "zero")
                if sign == 0:
                    raise IndeterminateCrossing("flat phase at omega=0 on the ray")
                events.append(
                    Crossing(
                        t=float(contour.t[i0]),
                        omega=0.0,
                        location=x0.real if chart == CHART_COMPLEX else float(curve.mag_db[i0]),
                        sign=sign,
                        kind=KIND_CUSP_ZERO,
                        chart=chart,
                        point=0j,
                        self_conjugate=True,
                    )
                )

    if tf.relative_degree == 0:
        x_inf = tf.leading_gain
        if abs(x_inf + 1) <= tol * (1 + abs(x_inf)):
            raise CriticalPointHit("L at infinity is the critical point")
        if x_inf < -1:
            on_arc = kinds == SEGMENT_ARC
            touching = np.nonzero(on_arc[:-1] | on_arc[1:])[0]
            excluded.update(int(i) for i in touching)
            if cusp_handler is not None:
                sign = cusp_handler(tf, "infinity")
                if sign == 0:
                    raise IndeterminateCrossing("flat phase at infinity on the ray")
                arc = contour.segments[-1]
                location = x_inf if chart == CHART_COMPLEX else float(20 * np.log10(abs(x_inf)))
                events.append(
                    Crossing(
                        t=(arc.t_start + arc.t_end) / 2,
                        omega=None,
                        location=location,
                        sign=sign,
                        kind=KIND_CUSP_INFINITY,
                        chart=chart,
                        point=complex(contour.big_radius, 0.0),
                        self_conjugate=True,
                    )
                )
    return excluded, events


def cusp_sign(tf: FactoredTF, at: CuspPoint) -> int:
    """Sign of an on-ray cusp crossing at omega=0 or infinity (0: not applicable or flat).

    Positive means the curve moves upward through the real axis.
    """
    geometry = _geometry(tf)
    magnitudes = [abs(r) for r in (*tf.zeros, *tf.poles) if r != 0]

    def axis_phase(omega: float) -> float:
        return float(loop_phase(tf, np.array([1j * omega]), np.array([False]))[0])

    if at == "zero":
        if tf.integrator_order or any(z == 0 for z in tf.zeros):
            return 0
        x0 = complex(evaluate(tf, np.array([0j]))[0][0])
        if x0.imag != 0.0 or x0.real > -1:
            return 0
        step = CUSP_STEP_FACTOR * min([1.0, *magnitudes])
        theta0 = axis_phase(0.0)
        for k in range(CUSP_LADDER_LENGTH):
            delta = axis_phase(step / 2**k) - theta0
            if abs(delta) > CUSP_NOISE_FLOOR:
                return -1 if delta > 0 else 1
        return 0

    if tf.relative_degree != 0 or tf.leading_gain > -1:
        return 0
    step = CUSP_STEP_FACTOR / max([1.0, *magnitudes])
    theta_inf = geometry.gain_phase + 90.0 * (len(geometry.zeros) - len(geometry.poles))
    for k in range(CUSP_LADDER_LENGTH):
        delta = axis_phase(2**k / step) - theta_inf
        if abs(delta) > CUSP_NOISE_FLOOR:
            return 1 if delta > 0 else -1
    return 0


def detect_ray_crossings(
    curve: MappedCurve,
    tol: float = DEFAULT_CRITICAL_TOL,
    cusp_handler: CuspHandler | None = cusp_sign,
) -> list[Crossing]:
    """Detect signed crossings of the ray (-inf, -1); upward is positive."""
    tf, contour = curve.tf, curve.contour
    excluded, crossings = cusp_events(curve, CHART_COMPLEX, tol, cusp_handler)

    upper = curve.value.imag >= 0
    candidates = np.nonzero(upper[:-1] != upper[1:])[0]

    def side(_segment: Segment, point: np.ndarray) -> bool:
        return bool(evaluate(tf, point)[0][0].imag >= 0)

    for index in candidates:
        index = int(index)
        if index in excluded:
            continue
        t_star, point = bisect_interval(contour, index, side)
        x = complex(evaluate(tf, np.array([point]))[0][0])
        if abs(x + 1) <= tol * (1 + abs(x)):
            raise CriticalPointHit(f"curve passes through -1 at t={t_star:.9g}", t_star)
        if x.real >= -1:
            continue
        segment = contour.segment_of(index)
        crossings.append(
            Crossing(
                t=t_star,
                omega=point.imag if segment.kind == SEGMENT_AXIS else None,
                location=x.real,
                sign=1 if not upper[index] else -1,
                kind=KIND_REGULAR,
                chart=CHART_COMPLEX,
                point=point,
                self_conjugate=_is_self_conjugate(point),
            )
        )

    crossings.sort(key=lambda c: c.t)
    _LOGGER.debug(
        "Found %s complex-plane crossings, sum %s",
        len(crossings),
        sum(c.sign for c in crossings),
    )
    return crossings


def _wrap_angle(delta: float) -> float:
    return (delta + np.pi) % (2 * np.pi) - np.pi


def _arg_change(
    tf: FactoredTF,
    segment: Segment,
    u_low: float,
    u_high: float,
    w_low: complex,
    w_high: complex,
    tol: float,
    depth: int,
) -> float:
    """Arg change of 1+L over [u_low, u_high], subdividing fast turns."""
    delta = _wrap_angle(np.angle(w_high) - np.angle(w_low))
    if abs(delta) <= np.radians(WINDING_MAX_STEP_DEG) or depth >= WINDING_MAX_DEPTH:
        return delta
    u_mid = (u_low + u_high) / 2
    if u_mid in (u_low, u_high):
        return delta
    value = complex(evaluate(tf, segment.point(np.array([u_mid])))[0][0])
    w_mid = value + 1
    if abs(w_mid) <= tol * (1 + abs(value)):
        raise CriticalPointHit("curve passes through -1")
    return _arg_change(tf, segment, u_low, u_mid, w_low, w_mid, tol, depth + 1) + _arg_change(
        tf, segment, u_mid, u_high, w_mid, w_high, tol, depth + 1
    )


def winding_number(curve: MappedCurve, tol: float = DEFAULT_CRITICAL_TOL) -> int:
    """Clockwise encirclements of -1, from the continuous argument of 1+L."""
    contour = curve.contour
    shifted = curve.value + 1
    near = np.abs(shifted) <= tol * (1 + np.abs(curve.value))
    if np.any(near):
        first = int(np.argmax(near))
        raise CriticalPointHit("curve passes through -1", float(contour.t[first]))

    steps = np.diff(np.angle(shifted))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    fast = np.nonzero(np.abs(steps) > np.radians(WINDING_MAX_STEP_DEG))[0]
    if fast.size:
        ends = contour.interval_end(fast)
        for index, u_end in zip(fast, ends, strict=True):
            steps[index] = _arg_change(
                curve.tf,
                contour.segment_of(int(index)),
                float(contour.u[index]),
                float(u_end),
                complex(shifted[index]),
                complex(shifted[index + 1]),
                tol,
                0,
            )

    turns = -float(steps.sum()) / (2 * np.pi)
    count = round(turns)
    if abs(turns - count) > WINDING_INTEGER_TOL:
        raise WindingNotInteger(turns)
    return int(count)
