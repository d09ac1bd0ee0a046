"""Factored transfer-function text format: parser, printer and algebra.

Grammar (whitespace-insensitive)::

    tf       := [sign] gain [ "*" prodpart ] [ "/" prodpart ]
              | [sign] prodpart [ "/" prodpart ]
    prodpart := factor { ["*"] factor }
    factor   := "(" poly ")" | "(" prodpart ")" | "s" [ "^" integer ]
    poly     := ["+"|"-"] term { ("+"|"-") term }
    term     := number [ ["*"] spow ] [ "/" number ] | spow [ "/" number ]
    spow     := "s" [ "^" integer ]

Every parenthesized polynomial is normalized: roots at the origin are split
off as bare ``s`` factors, the constant term is scaled to +-1 and the leading
coefficient made positive, with the scale absorbed into the gain.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .const import DEFAULT_CANCEL_TOL
from .exceptions import DegreeError, ParseError
from .polycore import RealPolynomial, poly_product

_LOGGER = logging.getLogger(__name__)

ORIGIN_ZERO = RealPolynomial((0.0, 1.0))

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<s>s)
    |(?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_FACTOR_START = ("(", "s")
_TF_START = ("number", "s", "(", "+", "-")


@dataclass(frozen=True)
class FactoredTF:
    """Loop function in factored form: gain, origin poles and low-order factors."""

    gain: float
    integrator_order: int = 0
    zero_factors: tuple[RealPolynomial, ...] = ()
    pole_factors: tuple[RealPolynomial, ...] = ()

    @property
    def is_zero(self) -> bool:
        """Return True for the zero function."""
        return self.gain == 0.0

    @property
    def zero_degree(self) -> int:
        """Return the total numerator degree."""
        return sum(f.degree for f in self.zero_factors)

    @property
    def pole_degree(self) -> int:
        """Return the total denominator degree including origin poles."""
        return sum(f.degree for f in self.pole_factors) + self.integrator_order

    @property
    def relative_degree(self) -> int:
        """Return pole degree minus zero degree (negative when improper)."""
        return self.pole_degree - self.zero_degree

    @property
    def zeros(self) -> tuple[complex, ...]:
        """Return all finite zeros."""
        return tuple(r for f in self.zero_factors for r in factor_roots(f))

    @property
    def poles(self) -> tuple[complex, ...]:
        """Return all finite poles, origin poles included."""
        origin = (0j,) * self.integrator_order
        return origin + tuple(r for f in self.pole_factors for r in factor_roots(f))

    @property
    def leading_gain(self) -> float:
        """Return k in L(s) = k * prod(s - z) / prod(s - p)."""
        gain = self.gain
        for factor in self.zero_factors:
            gain *= factor.lead
        for factor in self.pole_factors:
            gain /= factor.lead
        return gain

    def with_gain(self, gain: float) -> FactoredTF:
        """Return a copy with the gain replaced."""
        return replace(self, gain=float(gain))

    def canonical(self) -> FactoredTF:
        """Return a copy with factors in a fixed order."""
        return replace(
            self,
            zero_factors=tuple(sorted(self.zero_factors, key=_factor_key)),
            pole_factors=tuple(sorted(self.pole_factors, key=_factor_key)),
        )

    def is_close(self, other: FactoredTF, rel_tol: float = 1e-9) -> bool:
        """Return True when both functions have matching structure and values."""
        a, b = self.canonical(), other.canonical()
        if a.integrator_order != b.integrator_order:
            return False
        if not math.isclose(a.gain, b.gain, rel_tol=rel_tol, abs_tol=0.0):
            return False
        pairs = list(zip(a.zero_factors, b.zero_factors, strict=False)) + list(
            zip(a.pole_factors, b.pole_factors, strict=False)
        )
        if len(a.zero_factors) != len(b.zero_factors):
            return False
        if len(a.pole_factors) != len(b.pole_factors):
            return False
        return all(
            x.degree == y.degree
            and np.allclose(x.coeffs, y.coeffs, rtol=rel_tol, atol=rel_tol)
            for x, y in pairs
        )

    def __str__(self) -> str:
        return print_tf(self)


@dataclass(frozen=True)
class RationalTF:
    """Loop function as a ratio of expanded polynomials."""

    num: RealPolynomial
    den: RealPolynomial

    def characteristic(self) -> RealPolynomial:
        """Return num + den, whose zeros are the closed-loop poles."""
        return self.num + self.den


def _factor_key(factor: RealPolynomial) -> tuple[int, tuple[float, ...]]:
    return (factor.degree, factor.coeffs)


def factor_roots(factor: RealPolynomial) -> tuple[complex, ...]:
    """Return the roots of a degree 1 or 2 factor in closed form."""
    coeffs = factor.coeffs
    if factor.degree == 0:
        return ()
    if factor.degree == 1:
        return (complex(-coeffs[0] / coeffs[1], 0.0),)
    if factor.degree == 2:
        c, b, a = coeffs
        disc = b * b - 4 * a * c
        if disc < 0:
            re_part = -b / (2 * a)
            im_part = math.sqrt(-disc) / (2 * abs(a))
            return (complex(re_part, im_part), complex(re_part, -im_part))
        q = -(b + math.copysign(math.sqrt(disc), b)) / 2
        if q == 0.0:
            return (0j, 0j)
        return (complex(q / a, 0.0), complex(c / q, 0.0))
    raise DegreeError(factor.degree, 0)


# Parser


@dataclass
class _Token:
    kind: str
    text: str
    position: int


@dataclass
class _Product:
    """Partial product collected while parsing."""

    gain: float = 1.0
    factors: list[RealPolynomial] = field(default_factory=list)
    s_power: int = 0
    zero: bool = False

    def merge(self, other: _Product) -> None:
        self.gain *= other.gain
        self.factors.extend(other.factors)
        self.s_power += other.s_power
        self.zero = self.zero or other.zero

    @classmethod
    def from_poly(cls, poly: RealPolynomial) -> _Product:
        """Normalize one parenthesized polynomial."""
        if poly.is_zero:
            return cls(zero=True)
        coeffs = list(poly.coeffs)
        power = 0
        while coeffs[0] == 0.0:
            coeffs.pop(0)
            power += 1
        if len(coeffs) == 1:
            return cls(gain=coeffs[0], s_power=power)
        scale = abs(coeffs[0])
        normalized = [c / scale for c in coeffs]
        gain = scale
        if normalized[-1] < 0:
            normalized = [-c for c in normalized]
            gain = -gain
        return cls(gain=gain, factors=[RealPolynomial.of(normalized)], s_power=power)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ParseError(
                f"unexpected character {text[position]!r}", position, _TF_START
            )
        kind = match.lastgroup or ""
        if kind == "number":
            tokens.append(_Token("number", match.group(), position))
        elif kind == "s":
            tokens.append(_Token("s", "s", position))
        elif kind == "op":
            tokens.append(_Token(match.group(), match.group(), position))
        position = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str) -> None:
        self._tokens = _tokenize(text)
        self._index = 0

    def _peek(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        token = self._tokens[self._index]
        self._index += 1
        return token

    def _fail(self, expected: tuple[str, ...]) -> ParseError:
        token = self._peek()
        found = "end of input" if token.kind == "end" else repr(token.text)
        return ParseError(f"unexpected {found}", token.position, expected)

    def _expect(self, kind: str) -> _Token:
        if self._peek().kind != kind:
            raise self._fail((kind,))
        return self._advance()

    def _number(self) -> float:
        token = self._expect("number")
        value = float(token.text)
        if not math.isfinite(value):
            raise ParseError(f"number {token.text!r} is out of range", token.position)
        return value

    def _integer(self) -> int:
        token = self._peek()
        if token.kind != "number" or not token.text.isdigit():
            raise self._fail(("integer",))
        self._advance()
        return int(token.text)

    def _spow(self) -> int:
        self._expect("s")
        if self._peek().kind == "^":
            self._advance()
            return self._integer()
        return 1

    def parse(self) -> FactoredTF:
        sign = 1.0
        if self._peek().kind in ("+", "-"):
            sign = -1.0 if self._advance().kind == "-" else 1.0

        numerator = _Product()
        token = self._peek()
        if token.kind == "number":
            numerator.gain = self._number()
            if self._peek().kind == "*":
                self._advance()
                numerator.merge(self._prodpart())
            elif self._peek().kind in _FACTOR_START:
                numerator.merge(self._prodpart())
        elif token.kind in _FACTOR_START:
            numerator.merge(self._prodpart())
        else:
            raise self._fail(_TF_START)

        denominator = _Product()
        if self._peek().kind == "/":
            self._advance()
            denominator = self._prodpart()
        if self._peek().kind != "end":
            raise self._fail(("*", "/", "(", "s", "end"))

        if denominator.zero or denominator.gain == 0.0:
            raise ParseError("zero denominator", token.position)
        if numerator.zero or numerator.gain == 0.0:
            return FactoredTF(gain=0.0)

        gain = sign * numerator.gain / denominator.gain
        if not math.isfinite(gain) or gain == 0.0:
            raise ParseError("gain is out of range", token.position)
        zero_factors = (ORIGIN_ZERO,) * numerator.s_power + tuple(numerator.factors)
        return FactoredTF(
            gain=gain,
            integrator_order=denominator.s_power,
            zero_factors=zero_factors,
            pole_factors=tuple(denominator.factors),
        )

    def _prodpart(self) -> _Product:
        product = self._factor()
        while self._peek().kind in ("*", *_FACTOR_START):
            if self._peek().kind == "*":
                self._advance()
            product.merge(self._factor())
        return product

    def _factor(self) -> _Product:
        token = self._peek()
        if token.kind == "s":
            return _Product(s_power=self._spow())
        if token.kind != "(":
            raise self._fail(_FACTOR_START)

        self._advance()
        start = self._index
        try:
            poly = self._poly()
            self._expect(")")
        except ParseError as poly_error:
            self._index = start
            try:
                group = self._prodpart()
                self._expect(")")
            except ParseError as group_error:
                raise max(poly_error, group_error, key=lambda e: e.position) from None
            return group

        if poly.degree > 2:
            raise DegreeError(poly.degree, token.position)
        return _Product.from_poly(poly)

    def _poly(self) -> RealPolynomial:
        terms: dict[int, float] = {}
        sign = 1.0
        if self._peek().kind in ("+", "-"):
            sign = -1.0 if self._advance().kind == "-" else 1.0
        self._term(sign, terms)
        while self._peek().kind in ("+", "-"):
            sign = -1.0 if self._advance().kind == "-" else 1.0
            self._term(sign, terms)
        coeffs = [0.0] * (max(terms) + 1)
        for power, coeff in terms.items():
            coeffs[power] = coeff
        return RealPolynomial.of(coeffs)

    def _term(self, sign: float, terms: dict[int, float]) -> None:
        token = self._peek()
        power = 0
        if token.kind == "number":
            coeff = self._number()
            if self._peek().kind == "*":
                self._advance()
                power = self._spow()
            elif self._peek().kind == "s":
                power = self._spow()
        elif token.kind == "s":
            coeff = 1.0
            power = self._spow()
        else:
            raise self._fail(("number", "s"))

        if self._peek().kind == "/":
            self._advance()
            divisor_token = self._peek()
            divisor = self._number()
            if divisor == 0.0:
                raise ParseError("division by zero", divisor_token.position)
            coeff /= divisor
            if not math.isfinite(coeff):
                raise ParseError("coefficient is out of range", divisor_token.position)
        terms[power] = terms.get(power, 0.0) + sign * coeff


def parse_tf(text: str) -> FactoredTF:
    """Parse the factored transfer-function text format."""
    normalized = text.replace("−", "-")
    if not normalized.strip():
        raise ParseError("empty transfer function", 0, _TF_START)
    tf = _Parser(normalized).parse()
    _LOGGER.debug("Parsed %r as %s", text, tf)
    return tf


# Printer


def _number_text(value: float) -> str:
    if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _poly_text(factor: RealPolynomial) -> str:
    parts: list[str] = []
    for power in range(factor.degree, -1, -1):
        coeff = factor.coeffs[power]
        if coeff == 0.0:
            continue
        magnitude = abs(coeff)
        if power == 0:
            body = _number_text(magnitude)
        else:
            spow = "s" if power == 1 else f"s^{power}"
            if power == 1 and 1.0 / (1.0 / magnitude) == magnitude:
                body = f"s/{_number_text(1.0 / magnitude)}"
            elif magnitude == 1.0:
                body = spow
            else:
                body = f"{_number_text(magnitude)}*{spow}"
        if not parts:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f"{'-' if coeff < 0 else '+'}{body}")
    return "".join(parts)


def _product_text(origin: int, factors: tuple[RealPolynomial, ...]) -> list[str]:
    parts = []
    if origin:
        parts.append("s" if origin == 1 else f"s^{origin}")
    parts.extend(f"({_poly_text(f)})" for f in factors)
    return parts


def print_tf(tf: FactoredTF) -> str:
    """Print a FactoredTF in canonical text form (parse_tf reads it back)."""
    if tf.is_zero:
        return "0"
    origin = sum(1 for f in tf.zero_factors if f == ORIGIN_ZERO)
    others = tuple(f for f in tf.zero_factors if f != ORIGIN_ZERO)
    text = _number_text(tf.gain)
    numerator = _product_text(origin, others)
    if numerator:
        text += "*" + "".join(numerator)
    denominator = _product_text(tf.integrator_order, tf.pole_factors)
    if len(denominator) == 1:
        text += "/" + denominator[0]
    elif denominator:
        text += "/(" + "".join(denominator) + ")"
    return text


# Algebra


def expand(tf: FactoredTF) -> RationalTF:
    """Expand to num = gain * prod(zeros), den = s^m * prod(poles)."""
    num = poly_product(tf.zero_factors)
    num = RealPolynomial.of(num.as_array() * tf.gain)
    origin = RealPolynomial.of([0.0] * tf.integrator_order + [1.0])
    den = poly_product((origin, *tf.pole_factors))
    return RationalTF(num, den)


def compose(p: FactoredTF, g: FactoredTF) -> FactoredTF:
    """Form the loop function P(s)G(s) without cancelling anything."""
    return FactoredTF(
        gain=p.gain * g.gain,
        integrator_order=p.integrator_order + g.integrator_order,
        zero_factors=p.zero_factors + g.zero_factors,
        pole_factors=p.pole_factors + g.pole_factors,
    )


def cancel_check(
    tf: FactoredTF, tol: float = DEFAULT_CANCEL_TOL
) -> list[tuple[complex, complex]]:
    """Return (zero, pole) pairs that coincide within tol * max(1, |pole|)."""
    pairs: list[tuple[complex, complex]] = []
    poles = list(tf.poles)
    for zero in tf.zeros:
        for index, pole in enumerate(poles):
            if abs(zero - pole) <= tol * max(1.0, abs(pole)):
                pairs.append((zero, pole))
                poles.pop(index)
                break
    if pairs:
        _LOGGER.warning("Near pole-zero cancellation in %s: %s", tf, pairs)
    return pairs
