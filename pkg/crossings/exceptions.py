"""Exceptions raised by the crossings analyzer."""

from __future__ import annotations

from collections.abc import Iterable


class CrossingsError(Exception):
    """Base error for the crossings package."""


class InputError(CrossingsError):
    """Error to indicate the caller supplied unusable input."""


class ParseError(InputError):
    """Error to indicate a transfer function text could not be parsed."""

    def __init__(self, message: str, position: int, expected: Iterable[str] = ()) -> None:
        """Initialize with the offending position and the acceptable tokens."""
        self.position = position
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class DegreeError(InputError):
    """Error to indicate a parenthesized factor exceeds degree 2."""

    def __init__(self, degree: int, position: int) -> None:
        """Initialize with the factor degree and where it started."""
        self.degree = degree
        self.position = position
        super().__init__(
            f"factor of degree {degree} at position {position}; at most 2 is allowed"
        )


class InvalidConfig(InputError):
    """Error to indicate a configuration value is out of range."""


class NumericError(CrossingsError):
    """Error to indicate a numeric procedure failed."""


class ZeroPolynomialError(NumericError):
    """Error to indicate the zero polynomial was given where roots are needed."""


class NoConvergence(NumericError):
    """Error to indicate root iteration did not converge."""


class IndentTooLarge(NumericError):
    """Error to indicate indents around imaginary-axis poles would overlap."""


class RadiusTooSmall(NumericError):
    """Error to indicate the contour arc does not clear every pole and zero."""


class RefinementBudgetExceeded(NumericError):
    """Error to indicate adaptive refinement hit the sample cap."""

    def __init__(self, samples: int, cap: int) -> None:
        """Initialize with the sample count reached."""
        self.samples = samples
        self.cap = cap
        super().__init__(f"refinement needs more than {cap} samples (reached {samples})")


class PoleProximity(NumericError):
    """Error to indicate a contour sample sits on a pole."""


class WindingNotInteger(NumericError):
    """Error to indicate the argument of 1+L does not close to whole turns."""

    def __init__(self, turns: float) -> None:
        """Initialize with the measured number of turns."""
        self.turns = turns
        super().__init__(f"winding number {turns:.3f} is far from an integer")


class MethodDisagreement(NumericError):
    """Error to indicate crossing counts from different charts differ."""

    def __init__(self, counts: dict[str, int]) -> None:
        """Initialize with the per-method counts."""
        self.counts = dict(counts)
        summary = ", ".join(f"{key}={value}" for key, value in counts.items())
        super().__init__(f"crossing counts disagree: {summary}")


class MarginalError(CrossingsError):
    """Error to indicate the configuration is marginal and no verdict is defined."""


class Indeterminate(MarginalError):
    """Error to indicate a root lies on the imaginary axis."""


class CriticalPointHit(MarginalError):
    """Error to indicate the curve passes through a critical point."""

    def __init__(self, message: str, t: float | None = None) -> None:
        """Initialize with the contour parameter of the hit."""
        self.t = t
        super().__init__(message)


class MarginalPole(MarginalError):
    """Error to indicate an open-loop pole sits inside the marginal band off the axis."""


class IndeterminateCrossing(MarginalError):
    """Error to indicate a cusp crossing has no resolvable sign."""
