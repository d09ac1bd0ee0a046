"""Closed-loop stability from signed crossings on Nyquist and Nichols charts."""

from __future__ import annotations

from .config import ContourConfig, Tolerances, contour_config_for
from .exceptions import (
    CrossingsError,
    InputError,
    MarginalError,
    NumericError,
    ParseError,
)
from .tflang import FactoredTF, parse_tf, print_tf
from .verdict import (
    StabilityReport,
    Verdict,
    assess,
    fuzz_verify,
    gain_sweep,
    oracle_assess,
)

__version__ = "1.0.1"

__all__ = [
    "ContourConfig",
    "CrossingsError",
    "FactoredTF",
    "InputError",
    "MarginalError",
    "NumericError",
    "ParseError",
    "StabilityReport",
    "Tolerances",
    "Verdict",
    "__version__",
    "assess",
    "contour_config_for",
    "fuzz_verify",
    "gain_sweep",
    "oracle_assess",
    "parse_tf",
    "print_tf",
]
