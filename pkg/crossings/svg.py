"""Static SVG Nyquist and Nichols charts.

Output is deterministic: fixed coordinate formatting, fixed 1-2-5 tick ladder
and no external renderer.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .const import DEFAULT_PLOT_HEIGHT, DEFAULT_PLOT_WIDTH, MODE_SINGLE, RAY_PHASE
from .fresponse import Crossing, MappedCurve
from .nichols import NicholsCurve, ray_phases

PAD = 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
NYQUIST_CLIP = 20.0
NICHOLS_DB_LIMIT = 80.0
TICK_TARGET = 6


def _esc(text: str) -> str:
    """Escape XML special characters for safe inclusion in SVG."""
    return (
        (text or "")
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


@dataclass(frozen=True)
class PlotSeries:
    """One curve to draw, with the crossings detected on it."""

    gain: float
    curve: MappedCurve | NicholsCurve
    crossings: tuple[Crossing, ...] = ()


@dataclass(frozen=True)
class _Frame:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def x(self, value: float) -> float:
        share = (value - self.x_min) / (self.x_max - self.x_min)
        return PAD + share * (self.width - 2 * PAD)

    def y(self, value: float) -> float:
        share = (value - self.y_min) / (self.y_max - self.y_min)
        return self.height - PAD - share * (self.height - 2 * PAD)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (
            np.isfinite(x)
            & np.isfinite(y)
            & (x >= self.x_min)
            & (x <= self.x_max)
            & (y >= self.y_min)
            & (y <= self.y_max)
        )


def tick_step(span: float, target: int = TICK_TARGET) -> float:
    """Pick a tick spacing from the 1-2-5 ladder giving about target ticks."""
    if span <= 0 or not math.isfinite(span):
        return 1.0
    raw = span / target
    decade = 10 ** math.floor(math.log10(raw))
    for multiple in (1, 2, 5, 10):
        if multiple * decade >= raw:
            return multiple * decade
    return 10 * decade


def ticks(low: float, high: float) -> list[float]:
    """Return the tick values inside [low, high]."""
    step = tick_step(high - low)
    first = math.ceil(low / step)
    last = math.floor(high / step)
    return [round(k * step, 12) for k in range(first, last + 1)]


def _runs(mask: np.ndarray) -> Iterator[tuple[int, int]]:
    """Yield [start, stop) index ranges where mask is true."""
    edges = np.diff(np.concatenate(([0], mask.astype(int), [0])))
    starts = np.nonzero(edges == 1)[0]
    stops = np.nonzero(edges == -1)[0]
    yield from zip(starts.tolist(), stops.tolist(), strict=True)


def _polylines(
    frame: _Frame,
    x: np.ndarray,
    y: np.ndarray,
    color: str,
    gain: float,
    max_jump: float | None = None,
) -> list[str]:
    mask = frame.contains(x, y)
    if max_jump is not None and len(x) > 1:
        # break the line where a wrapped phase jumps between sheets
        jumps = np.nonzero(np.abs(np.diff(x)) > max_jump)[0]
        mask = np.repeat(mask, 2)
        mask[2 * jumps + 1] = False
        x, y = np.repeat(x, 2), np.repeat(y, 2)
    elements = []
    for start, stop in _runs(mask):
        if stop - start < 2:
            continue
        points = " ".join(
            f"{frame.x(a):.2f},{frame.y(b):.2f}"
            for a, b in zip(x[start:stop], y[start:stop], strict=True)
        )
        elements.append(
            f'<polyline class="curve" data-gain="{gain:.12g}" fill="none" '
            f'stroke="{color}" stroke-width="1.2" points="{points}"/>'
        )
    return elements


def _axes(frame: _Frame, x_label: str, y_label: str) -> list[str]:
    elements = []
    for value in ticks(frame.x_min, frame.x_max):
        px = frame.x(value)
        elements.append(
            f'<line class="grid" x1="{px:.2f}" y1="{PAD}" x2="{px:.2f}" '
            f'y2="{frame.height - PAD}" stroke="#e0e0e0"/>'
        )
        elements.append(
            f'<text x="{px:.2f}" y="{frame.height - PAD + 14}" font-size="10" '
            f'text-anchor="middle">{value:.6g}</text>'
        )
    for value in ticks(frame.y_min, frame.y_max):
        py = frame.y(value)
        elements.append(
            f'<line class="grid" x1="{PAD}" y1="{py:.2f}" x2="{frame.width - PAD}" '
            f'y2="{py:.2f}" stroke="#e0e0e0"/>'
        )
        elements.append(
            f'<text x="{PAD - 4}" y="{py + 3:.2f}" font-size="10" '
            f'text-anchor="end">{value:.6g}</text>'
        )
    elements.append(
        f'<text x="{frame.width / 2:.1f}" y="{frame.height - 8}" font-size="12" '
        f'text-anchor="middle">{_esc(x_label)}</text>'
    )
    elements.append(
        f'<text transform="translate(14,{frame.height / 2:.1f}) rotate(-90)" '
        f'font-size="12" text-anchor="middle">{_esc(y_label)}</text>'
    )
    return elements


def _marker(frame: _Frame, x: float, y: float, crossing: Crossing, color: str) -> list[str]:
    px = min(max(frame.x(x), PAD), frame.width - PAD)
    py = min(max(frame.y(y), PAD), frame.height - PAD)
    label = "+" if crossing.sign > 0 else "-"
    return [
        f'<circle class="crossing" data-sign="{crossing.sign:+d}" '
        f'data-kind="{crossing.kind}" cx="{px:.2f}" cy="{py:.2f}" r="4" '
        f'fill="none" stroke="{color}"/>',
        f'<text x="{px + 6:.2f}" y="{py - 6:.2f}" font-size="11" fill="{color}">{label}</text>',
    ]


def _document(title: str, width: int, height: int, body: list[str]) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'role="img" aria-label="{_esc(title)}">',
        f"<title>{_esc(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
        f"{_esc(title)}</text>",
        *body,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def render_nyquist_svg(
    series: Sequence[PlotSeries],
    width: int = DEFAULT_PLOT_WIDTH,
    height: int = DEFAULT_PLOT_HEIGHT,
    title: str = "Nyquist diagram",
) -> str:
    """Draw L along the contour in the complex plane with the ray (-inf, -1)."""
    limit = 2.0
    for item in series:
        magnitude = np.abs(item.curve.value)
        bounded = magnitude[np.isfinite(magnitude) & (magnitude <= NYQUIST_CLIP)]
        if bounded.size:
            limit = max(limit, float(bounded.max()))
        for crossing in item.crossings:
            limit = max(limit, 1.5 * abs(crossing.location))
    limit *= 1.1
    frame = _Frame(-limit, limit, -limit * height / width, limit * height / width, width, height)

    body = _axes(frame, "Re", "Im")
    body.append(
        f'<line class="ray" data-phase="{-RAY_PHASE:g}" x1="{frame.x(-1.0):.2f}" '
        f'y1="{frame.y(0.0):.2f}" x2="{PAD}" y2="{frame.y(0.0):.2f}" '
        f'stroke="#444" stroke-width="2"/>'
    )
    for number, item in enumerate(series):
        color = COLORS[number % len(COLORS)]
        body.extend(
            _polylines(frame, item.curve.value.real, item.curve.value.imag, color, item.gain)
        )
    body.append(
        f'<circle class="critical" cx="{frame.x(-1.0):.2f}" cy="{frame.y(0.0):.2f}" '
        f'r="3" fill="#000"/>'
    )
    for number, item in enumerate(series):
        color = COLORS[number % len(COLORS)]
        for crossing in item.crossings:
            body.extend(_marker(frame, crossing.location, 0.0, crossing, color))
    return _document(title, width, height, body)


def _crossing_phase(curve: NicholsCurve, crossing: Crossing) -> float:
    """Phase of the ray a crossing lies on."""
    if curve.mode == MODE_SINGLE:
        return -RAY_PHASE
    phase = float(np.interp(crossing.t, curve.t, curve.continuous_phase))
    return RAY_PHASE + 360.0 * round((phase - RAY_PHASE) / 360.0)


def render_nichols_svg(
    series: Sequence[PlotSeries],
    width: int = DEFAULT_PLOT_WIDTH,
    height: int = DEFAULT_PLOT_HEIGHT,
    title: str = "Nichols chart",
) -> str:
    """Draw (phase, dB) curves with the rays above 0 dB and critical points."""
    curves = [item.curve for item in series]
    rays = sorted({phase for curve in curves for phase in ray_phases(curve)})
    phases = [curve.phase_deg[np.isfinite(curve.mag_db)] for curve in curves]
    mags = [
        np.clip(curve.mag_db[np.isfinite(curve.mag_db)], -NICHOLS_DB_LIMIT, NICHOLS_DB_LIMIT)
        for curve in curves
    ]

    x_min = min([*rays, *(float(p.min()) for p in phases if p.size)]) - 10.0
    x_max = max([*rays, *(float(p.max()) for p in phases if p.size)]) + 10.0
    y_min = min([-20.0, *(float(m.min()) for m in mags if m.size)]) - 5.0
    y_max = max([20.0, *(float(m.max()) for m in mags if m.size)]) + 5.0
    frame = _Frame(x_min, x_max, y_min, y_max, width, height)

    body = _axes(frame, "Phase (deg)", "Magnitude (dB)")
    for ray in rays:
        body.append(
            f'<line class="ray" data-phase="{ray:g}" x1="{frame.x(ray):.2f}" '
            f'y1="{frame.y(0.0):.2f}" x2="{frame.x(ray):.2f}" y2="{PAD}" '
            f'stroke="#444" stroke-width="2"/>'
        )
    for number, item in enumerate(series):
        color = COLORS[number % len(COLORS)]
        body.extend(
            _polylines(
                frame,
                item.curve.phase_deg,
                item.curve.mag_db,
                color,
                item.gain,
                max_jump=180.0,
            )
        )
    for ray in rays:
        body.append(
            f'<circle class="critical" data-phase="{ray:g}" cx="{frame.x(ray):.2f}" '
            f'cy="{frame.y(0.0):.2f}" r="3" fill="#000"/>'
        )
    for number, item in enumerate(series):
        color = COLORS[number % len(COLORS)]
        for crossing in item.crossings:
            phase = _crossing_phase(item.curve, crossing)
            body.extend(_marker(frame, phase, crossing.location, crossing, color))
    return _document(title, width, height, body)
