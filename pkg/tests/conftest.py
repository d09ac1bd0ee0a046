"""Shared loop functions and helpers for crossings tests."""

from __future__ import annotations

import sys
from pathlib import Path

# Add the workspace root to Python path for imports
workspace_root = Path(__file__).parent.parent
if str(workspace_root) not in sys.path:
    sys.path.insert(0, str(workspace_root))

from crossings.config import contour_config_for  # noqa: E402, I001
from crossings.contour import build_contour, refine  # noqa: E402
from crossings.fresponse import MappedCurve, map_response  # noqa: E402
from crossings.tflang import FactoredTF, parse_tf  # noqa: E402

# Loop functions with the gain written as K
LOOPS = {
    "three_lags": "K/((s/1+1)(s/2+1)(s/3+1))",
    "unstable_poles": "K*(s/3+1)(s/5+1)/((s/2-1)(s/4-1))",
    "rhp_zero": "K*(s/0.5-1)/((s/2+1)(s/3+1))",
    "rhp_zero_unstable_poles": "K*(s/0.5-1)/((s/2-1)(s/3-1))",
    "integrator": "K/(s(s/0.5+1)(s/2+1))",
    "integrator_rhp_zero": "K*(s/2-1)/(s(s/1+1))",
}

# (loop, K, N_p, N, N_z, verdict)
STABILITY_TABLE = [
    ("three_lags", 5, 0, 0, 0, "Stable"),
    ("three_lags", 15, 0, 2, 2, "Unstable"),
    ("unstable_poles", 5, 2, -2, 0, "Stable"),
    ("unstable_poles", 1, 2, 0, 2, "Unstable"),
    ("rhp_zero", 0.5, 0, 0, 0, "Stable"),
    ("rhp_zero", 1.5, 0, 1, 1, "Unstable"),
    ("rhp_zero_unstable_poles", 0.5, 2, -2, 0, "Stable"),
    ("rhp_zero_unstable_poles", 1.5, 2, -1, 1, "Unstable"),
    ("integrator", 1, 0, 0, 0, "Stable"),
    ("integrator", 5, 0, 2, 2, "Unstable"),
    ("integrator_rhp_zero", -1, 0, 0, 0, "Stable"),
    ("integrator_rhp_zero", -5, 0, 2, 2, "Unstable"),
]


def loop_text(name: str, gain: float) -> str:
    """Return the loop text with K replaced by gain."""
    return LOOPS[name].replace("K", f"{gain:g}")


def make_loop(name: str, gain: float) -> FactoredTF:
    """Parse a loop function and set its gain."""
    return parse_tf(LOOPS[name].replace("K", "1")).with_gain(gain)


def mapped_curve(tf: FactoredTF) -> MappedCurve:
    """Map tf along its default refined contour."""
    cfg = contour_config_for(tf)
    return map_response(tf, refine(build_contour(tf, cfg), tf, cfg))
