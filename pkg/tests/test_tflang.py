"""Test the transfer-function text format."""

from __future__ import annotations

import pytest

from crossings.exceptions import DegreeError, ParseError
from crossings.polycore import RealPolynomial
from crossings.tflang import (
    FactoredTF,
    cancel_check,
    compose,
    expand,
    factor_roots,
    parse_tf,
    print_tf,
)

from .conftest import LOOPS, loop_text


def test_parse_first_order_factors() -> None:
    """Test parsing a plain product of first-order poles."""
    tf = parse_tf("5/((s/1+1)(s/2+1)(s/3+1))")
    assert tf.gain == 5.0
    assert tf.integrator_order == 0
    assert tf.zero_factors == ()
    assert tf.poles == pytest.approx([-1.0, -2.0, -3.0])
    assert tf.relative_degree == 3


def test_parse_integrator() -> None:
    """Test a bare s in the denominator becomes an origin pole."""
    tf = parse_tf("1/(s(s/0.5+1)(s/2+1))")
    assert tf.integrator_order == 1
    assert tf.poles[0] == 0j
    assert sorted(p.real for p in tf.poles) == pytest.approx([-2.0, -0.5, 0.0])


def test_parse_normalizes_constant_term() -> None:
    """Test the factor scale moves into the gain."""
    tf = parse_tf("10/(s+2)")
    assert tf.gain == 5.0
    assert tf.pole_factors == (RealPolynomial((1.0, 0.5)),)
    assert tf.leading_gain == 10.0


def test_parse_makes_leading_coefficient_positive() -> None:
    """Test a negative leading coefficient flips the gain."""
    tf = parse_tf("1/(1-s)")
    assert tf.gain == -1.0
    assert tf.poles == (1 + 0j,)
    assert tf.leading_gain == -1.0


def test_parse_negative_gain_and_unicode_minus() -> None:
    """Test leading signs and the typographic minus."""
    tf = parse_tf("-5*(s/2−1)/(s(s/1+1))")
    assert tf.gain == -5.0
    assert tf.zeros == (2 + 0j,)
    assert tf.integrator_order == 1


def test_parse_quadratic_factor_on_axis() -> None:
    """Test s^2 + 4 gives roots exactly on the imaginary axis."""
    tf = parse_tf("(s^2+4)/((s+1)(s+2))")
    assert all(z.real == 0.0 for z in tf.zeros)
    assert sorted(z.imag for z in tf.zeros) == [-2.0, 2.0]


def test_parse_origin_zero() -> None:
    """Test a root at the origin inside a polynomial is split off."""
    tf = parse_tf("(s^2+s)/(s+2)")
    assert 0j in tf.zeros
    assert -1 + 0j in tf.zeros


def test_zero_numerator() -> None:
    """Test the zero function."""
    tf = parse_tf("0/(s+1)")
    assert tf.is_zero
    assert print_tf(tf) == "0"


@pytest.mark.parametrize(
    "text",
    ["", "(((", "1/(s+", "5/((s+1)", "1/0", "1/(0)", "2**s", "1/(s+1))", "x"],
)
def test_parse_errors(text: str) -> None:
    """Test malformed text raises ParseError."""
    with pytest.raises(ParseError) as err:
        parse_tf(text)
    assert err.value.position >= 0


def test_parse_error_reports_expected_tokens() -> None:
    """Test the error carries the offending position."""
    with pytest.raises(ParseError) as err:
        parse_tf("1/(s+")
    assert err.value.position == 5
    assert err.value.expected


def test_degree_limit() -> None:
    """Test factors above degree two are rejected."""
    with pytest.raises(DegreeError) as err:
        parse_tf("1/(s^3+2*s+1)")
    assert err.value.degree == 3


@pytest.mark.parametrize(
    ("text", "degree"),
    [("1/(s^3+s)", 3), ("(s^3)/(s+1)", 3), ("1/(s^4+s^2)", 4)],
)
def test_degree_limit_counts_origin_roots(text: str, degree: int) -> None:
    """Test roots at the origin count toward the factor degree."""
    with pytest.raises(DegreeError) as err:
        parse_tf(text)
    assert err.value.degree == degree


def test_bare_origin_powers_are_unlimited() -> None:
    """Test s^3 outside parentheses is still accepted."""
    tf = parse_tf("1/(s^3(s+1))")
    assert tf.integrator_order == 3


@pytest.mark.parametrize("text", ["1e999/(s+1)", "1/(s/1e-320+1)", "(1e300)(1e300)/(s+1)"])
def test_non_finite_numbers_are_rejected(text: str) -> None:
    """Test overflowing numbers are parse errors."""
    with pytest.raises(ParseError):
        parse_tf(text)


@pytest.mark.parametrize("name", sorted(LOOPS))
def test_fixture_texts_print_back_verbatim(name: str) -> None:
    """Test the printer reproduces every reference loop."""
    for gain in (1.5, 5, -5):
        text = loop_text(name, gain)
        assert print_tf(parse_tf(text)) == text


def test_print_round_trip_generic() -> None:
    """Test printing and parsing keeps the function."""
    tf = parse_tf("0.3*(2*s+1)(s^2+0.5*s+1)/(s^2(s/7-1)(s/3+1))")
    again = parse_tf(print_tf(tf))
    assert again.is_close(tf)
    assert str(tf) == print_tf(tf)


def test_factor_roots_closed_form() -> None:
    """Test closed-form roots of small factors."""
    assert factor_roots(RealPolynomial((1.0, 0.5))) == (-2 + 0j,)
    roots = factor_roots(RealPolynomial((2.0, 3.0, 1.0)))
    assert sorted(r.real for r in roots) == pytest.approx([-2.0, -1.0])
    assert factor_roots(RealPolynomial((1.0,))) == ()


def test_expand() -> None:
    """Test expansion to numerator and denominator polynomials."""
    rational = expand(parse_tf("5/((s/1+1)(s/2+1)(s/3+1))"))
    assert rational.num.coeffs == (5.0,)
    assert rational.den.coeffs == pytest.approx([1.0, 11 / 6, 1.0, 1 / 6])
    assert rational.characteristic().coeffs == pytest.approx([6.0, 11 / 6, 1.0, 1 / 6])


def test_expand_integrator() -> None:
    """Test origin poles appear as a power of s."""
    rational = expand(parse_tf("2/(s^2(s+1))"))
    assert rational.den.coeffs == (0.0, 0.0, 1.0, 1.0)


def test_with_gain_and_compose() -> None:
    """Test gain replacement and series composition."""
    plant = parse_tf("2/(s+1)")
    controller = parse_tf("3*(s/4+1)/s")
    loop = compose(plant, controller)
    assert loop.gain == 6.0
    assert loop.integrator_order == 1
    assert loop.with_gain(10).gain == 10.0
    assert loop.with_gain(10).pole_factors == loop.pole_factors


def test_canonical_and_is_close() -> None:
    """Test structural comparison ignores factor order."""
    a = parse_tf("1/((s+1)(s+2))")
    b = parse_tf("1/((s+2)(s+1))")
    assert a.is_close(b)
    assert not a.is_close(b.with_gain(2.0))
    assert not a.is_close(FactoredTF(a.gain, 1, (), a.pole_factors))


def test_cancel_check() -> None:
    """Test near pole-zero cancellation is reported."""
    pairs = cancel_check(parse_tf("(s+1)/((s+1)(s+2))"))
    assert len(pairs) == 1
    assert pairs[0][0] == pytest.approx(-1.0)
    assert cancel_check(parse_tf("5/((s/1+1)(s/2+1)(s/3+1))")) == []
