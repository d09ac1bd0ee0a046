"""Constants for the crossings stability analyzer."""

from __future__ import annotations

import os

# Report document schema
SCHEMA_VERSION = "1.0"

# Root finding
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
PAIRING_TOL = 1e-8  # conjugate pairing / real snapping in the root post-pass

# A root is "on the imaginary axis" when |Re| <= band * max(1, |root|)
DEFAULT_MARGINAL_BAND = 1e-9

# Routh array
ROUTH_ZERO_TOL = 1e-12  # relative to the row scale
ROUTH_EPSILON = 1e-9  # infinitesimal replacing a zero first-column entry
ROUTH_AXIS_BAND = 1e-6  # auxiliary-polynomial roots closer than this are on the axis

# Nyquist contour
INDENT_FACTOR = 1e-4  # indent radius relative to axis-pole spacing
RADIUS_FACTOR = 1e4  # big radius relative to the largest pole/zero magnitude
MIN_RADIUS_FACTOR = 10  # big radius must exceed this many times the largest root
DEFAULT_SAMPLES_PER_DECADE = 64
DEFAULT_REFINE_DEG = 5.0
MAX_REFINE_DEG = 45.0
MAX_SAMPLES = 2**20
LOW_FREQUENCY_FACTOR = 1e-4  # lowest log-grid frequency relative to the smallest root
INDENT_SAMPLES = 72
ARC_SAMPLES = 256

# Frequency response
PROXIMITY_FLOOR = 1e-300  # |factor value| below this is a sample on a pole
DEFAULT_CRITICAL_TOL = 1e-8  # |L + 1| band around the critical point, relative
BISECTION_STEPS = 80
WINDING_MAX_STEP_DEG = 60.0
WINDING_MAX_DEPTH = 40
WINDING_INTEGER_TOL = 0.25  # turns of 1+L allowed off the nearest integer

# Cusp rule
CUSP_STEP_FACTOR = 1e-3  # first ladder step relative to the frequency scale
CUSP_LADDER_LENGTH = 40
CUSP_NOISE_FLOOR = 1e-12  # degrees

# Nichols chart
DEFAULT_TOL_DB = 1e-9
DEFAULT_TOL_DEG = 1e-6
RAY_PHASE = 180.0  # rays sit at 180 + 360k degrees

# Pole-zero cancellation
DEFAULT_CANCEL_TOL = 1e-6

# Randomized verification
FUZZ_MIN_MAGNITUDE = 0.1
FUZZ_MAX_MAGNITUDE = 10.0
FUZZ_MIN_GAIN = 0.1
FUZZ_MAX_GAIN = 100.0
FUZZ_MARGINAL_BAND = 1e-6

# Configuration keys
CONF_BIG_RADIUS = "big_radius"
CONF_INDENT_RADIUS = "indent_radius"
CONF_SAMPLES_PER_DECADE = "min_samples_per_decade"
CONF_REFINE_DEG = "max_refine_angle_deg"
CONF_MAX_SAMPLES = "max_samples"

CONF_ROOT_TOL = "root_tol"
CONF_MAX_ITER = "max_iter"
CONF_MARGINAL_BAND = "marginal_band"
CONF_CRITICAL_TOL = "critical_tol"
CONF_TOL_DB = "tol_db"
CONF_TOL_DEG = "tol_deg"
CONF_CANCEL_TOL = "cancel_tol"

# Segment tags
SEGMENT_AXIS = "axis"
SEGMENT_INDENT = "indent"
SEGMENT_ARC = "arc"

# Crossing kinds
KIND_REGULAR = "regular"
KIND_CUSP_ZERO = "cusp_zero"
KIND_CUSP_INFINITY = "cusp_infinity"

# Charts
CHART_COMPLEX = "complex"
CHART_NICHOLS_SINGLE = "nichols_single"
CHART_NICHOLS_MULTI = "nichols_multi"

# Nichols modes
MODE_SINGLE = "single"
MODE_MULTIPLE = "multiple"

# Report method keys
METHOD_NYQUIST = "nyquist"
METHOD_NICHOLS_SINGLE = "nichols_single"
METHOD_NICHOLS_MULTI = "nichols_multi"
METHOD_WINDING = "winding"

# Verdict kinds
VERDICT_STABLE = "Stable"
VERDICT_UNSTABLE = "Unstable"
VERDICT_MARGINAL = "Marginal"

# CLI exit codes
EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_MARGINAL = 4

# Curve export
CURVE_KIND_NYQUIST = "nyquist"
CURVE_KIND_NICHOLS_SINGLE = "nichols-single"
CURVE_KIND_NICHOLS_MULTI = "nichols-multi"
CURVE_KINDS = (CURVE_KIND_NYQUIST, CURVE_KIND_NICHOLS_SINGLE, CURVE_KIND_NICHOLS_MULTI)
CSV_COLUMNS = ("segment", "t", "omega", "re", "im", "mag_db", "phase_deg")

# Plot defaults
DEFAULT_PLOT_WIDTH = 640
DEFAULT_PLOT_HEIGHT = 480

# Environment
ENV_THREADS = "CROSSINGS_THREADS"
DEFAULT_THREADS = 4


def get_worker_count(requested: int | None = None) -> int:
    """Get the executor size, capped by CROSSINGS_THREADS when set."""
    count = requested or min(DEFAULT_THREADS, os.cpu_count() or 1)
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            cap = 0
        if cap > 0:
            count = min(count, cap)
    return max(1, count)


def format_float(value: float) -> float:
    """Round a float to 12 significant digits for deterministic output."""
    return float(f"{value:.12g}")
