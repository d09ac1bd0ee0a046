"""Standard Nyquist contour: axis runs, rightward indents and the closing arc."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import ContourConfig
from .const import (
    ARC_SAMPLES,
    DEFAULT_MARGINAL_BAND,
    INDENT_SAMPLES,
    LOW_FREQUENCY_FACTOR,
    MIN_RADIUS_FACTOR,
    SEGMENT_ARC,
    SEGMENT_AXIS,
    SEGMENT_INDENT,
)
from .exceptions import IndentTooLarge, RadiusTooSmall, RefinementBudgetExceeded
from .tflang import FactoredTF

_LOGGER = logging.getLogger(__name__)

MAX_REFINE_PASSES = 64


@dataclass(frozen=True)
class Segment:
    """One piece of the contour, parameterized by u.

    Axis runs use u = omega, indents and the arc use the polar angle.
    """

    kind: str
    u_start: float
    u_end: float
    t_start: float
    t_end: float
    center: complex = 0j
    radius: float = 0.0

    def point(self, u: float | np.ndarray) -> np.ndarray:
        """Return the contour point(s) at parameter u."""
        u = np.asarray(u, dtype=float)
        if self.kind == SEGMENT_AXIS:
            return 1j * u + 0.0
        if self.kind == SEGMENT_INDENT:
            return self.center + self.radius * np.exp(1j * u)
        return self.radius * np.exp(1j * u)


@dataclass(frozen=True, eq=False)
class NyquistContour:
    """Ordered samples of the clockwise contour, closed by a final sample at t=1."""

    s: np.ndarray
    t: np.ndarray
    u: np.ndarray
    segment_index: np.ndarray
    segments: tuple[Segment, ...]
    detoured_poles: tuple[complex, ...]
    axis_zeros: tuple[float, ...]
    big_radius: float
    indent_radius: float

    def __len__(self) -> int:
        return len(self.s)

    @property
    def kinds(self) -> np.ndarray:
        """Return the segment tag of every sample."""
        tags = np.array([seg.kind for seg in self.segments])
        return tags[self.segment_index]

    @property
    def on_arc(self) -> np.ndarray:
        """Return a mask of samples on the infinite arc."""
        return self.kinds == SEGMENT_ARC

    def segment_of(self, index: int) -> Segment:
        """Return the segment owning the interval that starts at sample index."""
        return self.segments[int(self.segment_index[index])]

    def interval_end(self, index: np.ndarray | int) -> np.ndarray:
        """Return the u value closing each interval within its own segment."""
        index = np.asarray(index)
        ends = np.array([seg.u_end for seg in self.segments])
        same = self.segment_index[index] == self.segment_index[index + 1]
        return np.where(same, self.u[index + 1], ends[self.segment_index[index]])

    def t_at(self, index: int, u: float) -> float:
        """Interpolate the contour parameter inside interval index."""
        u_start = self.u[index]
        u_end = float(self.interval_end(index))
        if u_end == u_start:
            return float(self.t[index])
        share = (u - u_start) / (u_end - u_start)
        return float(self.t[index] + share * (self.t[index + 1] - self.t[index]))

    def rows(self):
        """Yield one dictionary per sample."""
        kinds = self.kinds
        for i in range(len(self.s)):
            yield {"t": float(self.t[i]), "s": complex(self.s[i]), "segment": kinds[i]}


def _distinct_heights(values: list[float]) -> list[float]:
    heights: list[float] = []
    for value in sorted(values):
        if heights and abs(value - heights[-1]) <= 1e-12 * max(1.0, abs(value)):
            continue
        heights.append(value)
    return heights


def _frequency_grid(
    tf: FactoredTF, cfg: ContourConfig, heights: list[float]
) -> np.ndarray:
    """Log-spaced frequencies plus log-distance grids around axis poles."""
    big, eps = cfg.big_radius, cfg.indent_radius
    per_decade = cfg.min_samples_per_decade
    nonzero = [abs(r) for r in (*tf.poles, *tf.zeros) if r != 0]
    low = min(LOW_FREQUENCY_FACTOR * min([1.0, *nonzero]), eps)
    count = math.ceil(math.log10(big / low) * per_decade) + 1
    base = np.geomspace(low, big, count)
    parts = [-base, base, np.array([0.0])]
    for height in heights:
        if height == 0.0:
            continue
        span = max(abs(height), 1.0)
        local_count = math.ceil(math.log10(span / eps) * per_decade) + 1
        local = np.geomspace(eps, span, local_count)
        parts.extend((height - local, height + local))
    return np.unique(np.concatenate(parts))


def build_contour(tf: FactoredTF, cfg: ContourConfig) -> NyquistContour:
    """Build the clockwise contour: up the axis with indents, then the arc."""
    big, eps = cfg.big_radius, cfg.indent_radius
    largest = max([1.0, *(abs(r) for r in (*tf.poles, *tf.zeros))])
    if big <= MIN_RADIUS_FACTOR * largest:
        raise RadiusTooSmall(
            f"arc radius {big} must exceed {MIN_RADIUS_FACTOR} x {largest}"
        )

    axis_poles = [
        p for p in tf.poles if abs(p.real) <= DEFAULT_MARGINAL_BAND * max(1.0, abs(p))
    ]
    heights = _distinct_heights([p.imag for p in axis_poles])
    for low, high in zip(heights, heights[1:], strict=False):
        if eps >= (high - low) / 2:
            raise IndentTooLarge(
                f"indent radius {eps} is not below half the pole spacing {high - low}"
            )
    axis_zeros = tuple(z.imag for z in tf.zeros if z.real == 0.0)

    grid = _frequency_grid(tf, cfg, heights)
    for zero in axis_zeros:
        grid = grid[np.abs(grid - zero) > 1e-12 * max(1.0, abs(zero))]

    starts = [-big] + [h + eps for h in heights]
    ends = [h - eps for h in heights] + [big]
    pieces: list[tuple[str, np.ndarray, float, float, complex, float]] = []
    for run, (start, end) in enumerate(zip(starts, ends, strict=True)):
        inside = grid[(grid > start) & (grid < end)]
        pieces.append((SEGMENT_AXIS, np.concatenate(([start], inside)), start, end, 0j, 0.0))
        if run < len(heights):
            angles = np.linspace(-np.pi / 2, np.pi / 2, INDENT_SAMPLES, endpoint=False)
            pieces.append(
                (SEGMENT_INDENT, angles, -np.pi / 2, np.pi / 2, 1j * heights[run], eps)
            )
    arc_angles = np.pi / 2 - np.pi * np.arange(ARC_SAMPLES) / ARC_SAMPLES
    pieces.append((SEGMENT_ARC, arc_angles, np.pi / 2, -np.pi / 2, 0j, big))

    share = 1.0 / len(pieces)
    segments: list[Segment] = []
    s_parts, t_parts, u_parts, index_parts = [], [], [], []
    for number, (kind, u, u_start, u_end, center, radius) in enumerate(pieces):
        segment = Segment(
            kind=kind,
            u_start=u_start,
            u_end=u_end,
            t_start=number * share,
            t_end=(number + 1) * share,
            center=center,
            radius=radius,
        )
        segments.append(segment)
        s_parts.append(segment.point(u))
        t_parts.append(segment.t_start + share * np.arange(len(u)) / len(u))
        u_parts.append(u)
        index_parts.append(np.full(len(u), number))

    arc = segments[-1]
    s_parts.append(arc.point(np.array([arc.u_end])))
    t_parts.append(np.array([1.0]))
    u_parts.append(np.array([arc.u_end]))
    index_parts.append(np.array([len(segments) - 1]))

    contour = NyquistContour(
        s=np.concatenate(s_parts).astype(complex),
        t=np.concatenate(t_parts),
        u=np.concatenate(u_parts).astype(float),
        segment_index=np.concatenate(index_parts).astype(int),
        segments=tuple(segments),
        detoured_poles=tuple(complex(0.0, h) for h in heights),
        axis_zeros=axis_zeros,
        big_radius=big,
        indent_radius=eps,
    )
    _LOGGER.debug(
        "Built contour with %s samples, %s segments, %s indents",
        len(contour),
        len(segments),
        len(heights),
    )
    return contour


def _straddles_axis_zero(contour: NyquistContour, index: np.ndarray) -> np.ndarray:
    """Mask intervals on the axis that contain an imaginary-axis zero."""
    mask = np.zeros(len(index), dtype=bool)
    if not contour.axis_zeros:
        return mask
    on_axis = contour.kinds[index] == SEGMENT_AXIS
    start = contour.u[index]
    end = contour.interval_end(index)
    for zero in contour.axis_zeros:
        mask |= on_axis & ((start - zero) * (end - zero) <= 0)
    return mask


def refine(
    contour: NyquistContour, tf: FactoredTF, cfg: ContourConfig
) -> NyquistContour:
    """Insert midpoints until the loop phase moves at most the configured bound per step."""
    from .fresponse import loop_phase

    s, t, u, index = contour.s, contour.t, contour.u, contour.segment_index
    work = contour
    inserted = 0
    for _ in range(MAX_REFINE_PASSES):
        phase = loop_phase(tf, s, work.on_arc)
        intervals = np.arange(len(s) - 1)
        coarse = np.abs(np.diff(phase)) > cfg.max_refine_angle_deg
        coarse &= ~_straddles_axis_zero(work, intervals)
        todo = intervals[coarse]
        if todo.size == 0:
            break

        u_end = work.interval_end(todo)
        u_mid = (u[todo] + u_end) / 2
        t_mid = (t[todo] + t[todo + 1]) / 2
        movable = (u_mid != u[todo]) & (t_mid != t[todo])
        todo, u_mid, t_mid = todo[movable], u_mid[movable], t_mid[movable]
        if todo.size == 0:
            break
        if len(s) + todo.size > cfg.max_samples:
            raise RefinementBudgetExceeded(len(s) + todo.size, cfg.max_samples)

        seg_mid = index[todo]
        s_mid = np.empty(todo.size, dtype=complex)
        for number in np.unique(seg_mid):
            chosen = seg_mid == number
            s_mid[chosen] = contour.segments[number].point(u_mid[chosen])

        s = np.insert(s, todo + 1, s_mid)
        t = np.insert(t, todo + 1, t_mid)
        u = np.insert(u, todo + 1, u_mid)
        index = np.insert(index, todo + 1, seg_mid)
        inserted += todo.size
        work = NyquistContour(
            s=s,
            t=t,
            u=u,
            segment_index=index,
            segments=contour.segments,
            detoured_poles=contour.detoured_poles,
            axis_zeros=contour.axis_zeros,
            big_radius=contour.big_radius,
            indent_radius=contour.indent_radius,
        )

    _LOGGER.debug("Refinement inserted %s samples (total %s)", inserted, len(work))
    return work
