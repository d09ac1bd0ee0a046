"""Real polynomial arithmetic, root finding and Routh-Hurwitz counting."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .const import (
    DEFAULT_MARGINAL_BAND,
    DEFAULT_MAX_ITER,
    DEFAULT_ROOT_TOL,
    PAIRING_TOL,
    ROUTH_AXIS_BAND,
    ROUTH_EPSILON,
    ROUTH_ZERO_TOL,
)
from .exceptions import Indeterminate, NoConvergence, ZeroPolynomialError

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial with real coefficients in ascending degree order."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        """Trim high-order zeros so the leading coefficient is nonzero."""
        values = [float(c) for c in self.coeffs] or [0.0]
        while len(values) > 1 and values[-1] == 0.0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    @classmethod
    def of(cls, coeffs: Iterable[float]) -> RealPolynomial:
        """Build a polynomial from any iterable of coefficients."""
        return cls(tuple(float(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Return the degree (0 for constants and the zero polynomial)."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        """Return True for the literal zero polynomial."""
        return self.coeffs == (0.0,)

    @property
    def lead(self) -> float:
        """Return the highest-order coefficient."""
        return self.coeffs[-1]

    @property
    def scale(self) -> float:
        """Return the largest coefficient magnitude."""
        return max(abs(c) for c in self.coeffs)

    def as_array(self) -> np.ndarray:
        """Return the coefficients as a float array."""
        return np.asarray(self.coeffs, dtype=float)

    def __mul__(self, other: RealPolynomial) -> RealPolynomial:
        return RealPolynomial.of(npoly.polymul(self.as_array(), other.as_array()))

    def __add__(self, other: RealPolynomial) -> RealPolynomial:
        return RealPolynomial.of(npoly.polyadd(self.as_array(), other.as_array()))

    def derivative(self) -> RealPolynomial:
        """Return the first derivative."""
        if self.degree == 0:
            return RealPolynomial((0.0,))
        return RealPolynomial.of(npoly.polyder(self.as_array()))


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial with the worst residual seen."""

    roots: tuple[complex, ...]
    residual: float

    def count_rhp(self, band: float = 0.0) -> int:
        """Count roots with real part beyond the band."""
        return sum(1 for r in self.roots if r.real > band * max(1.0, abs(r)))

    def on_axis(self, band: float = DEFAULT_MARGINAL_BAND) -> list[complex]:
        """Return roots within the marginal band of the imaginary axis."""
        return [r for r in self.roots if abs(r.real) <= band * max(1.0, abs(r))]


def poly_eval(p: RealPolynomial, s: complex | np.ndarray) -> complex | np.ndarray:
    """Evaluate p at s by Horner's recurrence (s may be an array)."""
    result = p.coeffs[-1] + 0 * s
    for coeff in reversed(p.coeffs[:-1]):
        result = result * s + coeff
    return result


def poly_product(polys: Iterable[RealPolynomial]) -> RealPolynomial:
    """Multiply any number of polynomials together."""
    result = np.array([1.0])
    for poly in polys:
        result = npoly.polymul(result, poly.as_array())
    return RealPolynomial.of(result)


def _pair_conjugates(roots: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the real axis and average conjugate partners."""
    roots = roots.copy()
    near_real = np.abs(roots.imag) <= PAIRING_TOL * (1.0 + np.abs(roots))
    roots[near_real] = roots[near_real].real

    upper = [i for i in range(len(roots)) if roots[i].imag > 0]
    lower = {i for i in range(len(roots)) if roots[i].imag < 0}
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda k: abs(roots[k] - np.conj(roots[i])))
        lower.discard(j)
        merged = (roots[i] + np.conj(roots[j])) / 2
        roots[i] = merged
        roots[j] = np.conj(merged)
    return roots


def poly_roots(
    p: RealPolynomial,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RootSet:
    """Find all roots of p by Aberth-Ehrlich simultaneous iteration."""
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no finite root set")

    coeffs = p.as_array()
    # exact roots at the origin
    n_zero = int(np.argmax(coeffs != 0.0))
    reduced = coeffs[n_zero:]
    degree = len(reduced) - 1
    found: list[complex] = [0j] * n_zero

    if degree == 1:
        found.append(complex(-reduced[0] / reduced[1]))
    elif degree >= 2:
        desc = reduced[::-1] / reduced[-1]
        ddesc = np.polyder(desc)
        abs_desc = np.abs(desc)
        radius = 1.0 + np.max(np.abs(reduced[:-1])) / abs(reduced[-1])
        angles = 2 * np.pi * np.arange(degree) / degree + np.pi / (2 * degree)
        z = radius * np.exp(1j * angles)
        active = np.ones(degree, dtype=bool)
        eye = np.eye(degree, dtype=bool)
        eps = np.finfo(float).eps

        for iteration in range(max_iter):
            pz = np.polyval(desc, z)
            dpz = np.polyval(ddesc, z)
            small = np.abs(pz) <= 16 * eps * np.polyval(abs_desc, np.abs(z))
            active &= ~small
            if not active.any():
                break
            dpz = np.where(dpz == 0, eps, dpz)
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            diff[eye] = 1.0
            repulsion = np.where(eye, 0.0, 1.0 / diff).sum(axis=1)
            step = ratio / (1.0 - ratio * repulsion)
            step[~active] = 0.0
            z = z - step
            active &= np.abs(step) > tol * (1.0 + np.abs(z))
            if not active.any():
                break
        else:
            raise NoConvergence(
                f"root iteration did not converge in {max_iter} steps (degree {degree})"
            )
        _LOGGER.debug("Aberth iteration converged after %s steps", iteration + 1)
        found.extend(_pair_conjugates(z).tolist())

    roots = tuple(sorted((complex(r) for r in found), key=lambda r: (r.real, r.imag)))
    residual = max((abs(poly_eval(p, r)) for r in roots), default=0.0)
    return RootSet(roots=roots, residual=float(residual))


def _routh_count(desc: np.ndarray, epsilon_sign: float) -> int:
    """Build the Routh array for descending coefficients and count sign changes."""
    degree = len(desc) - 1
    width = degree // 2 + 1
    rows = np.zeros((degree + 1, width))
    rows[0, : len(desc[0::2])] = desc[0::2]
    rows[1, : len(desc[1::2])] = desc[1::2]
    scale = np.max(np.abs(desc))

    for i in range(2, degree + 1):
        above, prev = rows[i - 1], rows[i - 2]
        above_scale = max(np.max(np.abs(above)), np.max(np.abs(prev)), scale)
        if np.all(np.abs(above) <= ROUTH_ZERO_TOL * above_scale):
            # zero row: replace by the derivative of the auxiliary polynomial
            order = degree - (i - 2)
            powers = order - 2 * np.arange(width)
            aux = prev * np.where(powers >= 0, powers, 0)
            rows[i - 1] = aux
            above = aux
            aux_desc = np.zeros(order + 1)
            aux_desc[0::2] = prev[: len(aux_desc[0::2])]
            aux_poly = RealPolynomial.of(aux_desc[::-1])
            if not aux_poly.is_zero and aux_poly.degree > 0:
                aux_roots = poly_roots(aux_poly)
                if aux_roots.on_axis(ROUTH_AXIS_BAND):
                    raise Indeterminate("auxiliary polynomial has imaginary-axis roots")
        if abs(above[0]) <= ROUTH_ZERO_TOL * above_scale:
            above = above.copy()
            above[0] = epsilon_sign * ROUTH_EPSILON * above_scale
            rows[i - 1] = above
        for j in range(width - 1):
            rows[i, j] = (above[0] * prev[j + 1] - prev[0] * above[j + 1]) / above[0]

    last = rows[degree]
    if abs(last[0]) <= ROUTH_ZERO_TOL * scale:
        rows[degree, 0] = epsilon_sign * ROUTH_EPSILON * scale

    signs = np.sign(rows[:, 0])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def routh_rhp_count(p: RealPolynomial) -> int:
    """Count roots with strictly positive real part via the Routh array."""
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no Routh array")
    if p.degree == 0:
        return 0
    if p.coeffs[0] == 0.0:
        raise Indeterminate("polynomial has a root at the origin")

    desc = p.as_array()[::-1]
    positive = _routh_count(desc, 1.0)
    negative = _routh_count(desc, -1.0)
    if positive != negative:
        raise Indeterminate(
            "epsilon substitution depends on sign; a root lies on the imaginary axis"
        )
    return positive


def root_bound(p: RealPolynomial) -> float:
    """Return Fujiwara's upper bound on the root magnitudes of p."""
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no finite root set")
    degree = p.degree
    if degree == 0:
        return 0.0
    desc = p.as_array()[::-1]
    ratios = np.abs(desc[1:] / desc[0])
    ratios[-1] /= 2
    powers = 1.0 / np.arange(1, degree + 1)
    return float(2 * np.max(ratios**powers))


def from_roots(roots: Sequence[complex]) -> RealPolynomial:
    """Build the monic real polynomial with the given (conjugate-closed) roots."""
    return RealPolynomial.of(np.real(npoly.polyfromroots(np.asarray(roots))))
