"""Configuration schemas for contour geometry and numeric tolerances."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any

import voluptuous as vol

from .const import (
    CONF_BIG_RADIUS,
    CONF_CANCEL_TOL,
    CONF_CRITICAL_TOL,
    CONF_INDENT_RADIUS,
    CONF_MARGINAL_BAND,
    CONF_MAX_ITER,
    CONF_MAX_SAMPLES,
    CONF_REFINE_DEG,
    CONF_ROOT_TOL,
    CONF_SAMPLES_PER_DECADE,
    CONF_TOL_DB,
    CONF_TOL_DEG,
    DEFAULT_CANCEL_TOL,
    DEFAULT_CRITICAL_TOL,
    DEFAULT_MARGINAL_BAND,
    DEFAULT_MAX_ITER,
    DEFAULT_REFINE_DEG,
    DEFAULT_ROOT_TOL,
    DEFAULT_SAMPLES_PER_DECADE,
    DEFAULT_TOL_DB,
    DEFAULT_TOL_DEG,
    INDENT_FACTOR,
    MAX_REFINE_DEG,
    MAX_SAMPLES,
    RADIUS_FACTOR,
)
from .exceptions import InvalidConfig
from .polycore import root_bound
from .tflang import FactoredTF, expand

_LOGGER = logging.getLogger(__name__)

_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))

CONTOUR_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_BIG_RADIUS): _POSITIVE,
        vol.Optional(CONF_INDENT_RADIUS): _POSITIVE,
        vol.Optional(
            CONF_SAMPLES_PER_DECADE, default=DEFAULT_SAMPLES_PER_DECADE
        ): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_REFINE_DEG, default=DEFAULT_REFINE_DEG): vol.All(
            vol.Coerce(float),
            vol.Range(min=0, max=MAX_REFINE_DEG, min_included=False),
        ),
        vol.Optional(CONF_MAX_SAMPLES, default=MAX_SAMPLES): vol.All(
            vol.Coerce(int), vol.Range(min=16, max=MAX_SAMPLES)
        ),
    }
)

TOLERANCE_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_ROOT_TOL, default=DEFAULT_ROOT_TOL): _POSITIVE,
        vol.Optional(CONF_MAX_ITER, default=DEFAULT_MAX_ITER): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_MARGINAL_BAND, default=DEFAULT_MARGINAL_BAND): _POSITIVE,
        vol.Optional(CONF_CRITICAL_TOL, default=DEFAULT_CRITICAL_TOL): _POSITIVE,
        vol.Optional(CONF_TOL_DB, default=DEFAULT_TOL_DB): _POSITIVE,
        vol.Optional(CONF_TOL_DEG, default=DEFAULT_TOL_DEG): _POSITIVE,
        vol.Optional(CONF_CANCEL_TOL, default=DEFAULT_CANCEL_TOL): _POSITIVE,
    }
)


@dataclass(frozen=True)
class ContourConfig:
    """Geometry of the Nyquist contour and its sampling."""

    big_radius: float
    indent_radius: float
    min_samples_per_decade: int = DEFAULT_SAMPLES_PER_DECADE
    max_refine_angle_deg: float = DEFAULT_REFINE_DEG
    max_samples: int = MAX_SAMPLES

    def __post_init__(self) -> None:
        """Validate the radii and refinement bound."""
        if not 0 < self.indent_radius < self.big_radius:
            raise InvalidConfig(
                f"indent radius {self.indent_radius} must lie in (0, {self.big_radius})"
            )
        if not 0 < self.max_refine_angle_deg <= MAX_REFINE_DEG:
            raise InvalidConfig(
                f"refine bound {self.max_refine_angle_deg} must lie in (0, {MAX_REFINE_DEG}]"
            )

    def as_dict(self) -> dict[str, Any]:
        """Return the configuration as a plain dictionary."""
        return asdict(self)


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances shared by the analysis pipeline."""

    root_tol: float = DEFAULT_ROOT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    marginal_band: float = DEFAULT_MARGINAL_BAND
    critical_tol: float = DEFAULT_CRITICAL_TOL
    tol_db: float = DEFAULT_TOL_DB
    tol_deg: float = DEFAULT_TOL_DEG
    cancel_tol: float = DEFAULT_CANCEL_TOL

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None = None) -> Tolerances:
        """Validate a dictionary of overrides and build tolerances."""
        try:
            values = TOLERANCE_SCHEMA(dict(data or {}))
        except vol.Invalid as err:
            raise InvalidConfig(f"invalid tolerance: {err}") from err
        return cls(**values)

    def as_dict(self) -> dict[str, Any]:
        """Return the tolerances as a plain dictionary."""
        return asdict(self)


def _axis_spacing(tf: FactoredTF, band: float) -> float | None:
    """Return the smallest spacing between distinct imaginary-axis poles."""
    heights = sorted(
        {p.imag for p in tf.poles if abs(p.real) <= band * max(1.0, abs(p))}
    )
    gaps = [b - a for a, b in zip(heights, heights[1:], strict=False)]
    gaps.extend(abs(h) for h in heights if h != 0.0)
    return min(gaps) if gaps else None


def _root_scale(tf: FactoredTF) -> float:
    """Bound the open-loop roots and the closed-loop roots of tf."""
    magnitudes = [abs(r) for r in (*tf.poles, *tf.zeros)]
    characteristic = expand(tf).characteristic()
    if not characteristic.is_zero:
        magnitudes.append(root_bound(characteristic))
    return max([1.0, *magnitudes])


def contour_config_for(
    tf: FactoredTF, overrides: dict[str, Any] | None = None
) -> ContourConfig:
    """Build a contour configuration scaled to the roots of tf."""
    try:
        values = CONTOUR_SCHEMA(dict(overrides or {}))
    except vol.Invalid as err:
        raise InvalidConfig(f"invalid contour setting: {err}") from err

    if CONF_BIG_RADIUS not in values:
        values[CONF_BIG_RADIUS] = RADIUS_FACTOR * _root_scale(tf)
    if CONF_INDENT_RADIUS not in values:
        spacing = _axis_spacing(tf, DEFAULT_MARGINAL_BAND)
        values[CONF_INDENT_RADIUS] = INDENT_FACTOR * min(1.0, spacing or 1.0)

    config = ContourConfig(**values)
    _LOGGER.debug("Contour configuration for %s: %s", tf, config)
    return config
