from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbailey.errors import LatticeError, OutOfRangeError, PrecisionError, SeriesZeroDivisionError
from qbailey.factory import euler
from qbailey.series import (
    Monomial,
    QSeries,
    add,
    coefficient_at,
    div,
    equal_up_to,
    mul,
    rescale,
    sub,
    substitute_base,
    truncate,
)


def poly(*coeffs, order=None, scale=1):
    return QSeries.from_coefficients(coeffs, order=order, scale=scale)


ONE_MINUS_Q = poly(1, -1)
ONE_PLUS_Q = poly(1, 1)


# -- construction ------------------------------------------------------------


def test_rational_coefficients_are_normalized():
    x = QSeries.from_terms({0: Fraction(2, 4), 1: Fraction(-6, 3)})
    assert coefficient_at(x, 0) == Fraction(1, 2)
    assert coefficient_at(x, 1) == -2


def test_empty_window_is_zero_with_precision():
    z = QSeries.zero(order=5)
    assert z.is_zero()
    assert z.precision == 5
    assert z.valuation is None


def test_monomial_requires_nonzero_coefficient():
    with pytest.raises(ValueError):
        Monomial(0, 1)


def test_monomial_exponent_in_lowest_terms():
    m = Monomial(3, Fraction(2, 4))
    assert (m.exp_num, m.exp_scale) == (1, 2)


# -- rescale -------------------------------------------------------------------


def test_rescale_embeds_on_even_points():
    x = poly(1, -1, order=10)
    y = rescale(x, 2)
    assert y.scale == 2
    assert y.order == 20
    assert coefficient_at(y, 1) == -1
    assert coefficient_at(y, Fraction(1, 2)) == 0


def test_rescale_same_lattice_unchanged():
    x = QSeries.monomial(1, Fraction(1, 2))
    assert rescale(x, 2) == x
    assert rescale(x, 2).scale == 2


def test_rescale_to_three():
    y = rescale(ONE_PLUS_Q, 3)
    assert y.min_exp == 0
    assert y.coeffs == (1, 0, 0, 1)


def test_rescale_rejects_non_multiple():
    with pytest.raises(LatticeError):
        rescale(QSeries.monomial(1, Fraction(1, 2)), 3)


def test_rescale_composes():
    x = QSeries.from_terms({Fraction(1, 2): 3, 2: -1}, order=5)
    assert rescale(rescale(x, 4), 12).coeffs == rescale(x, 12).coeffs
    assert rescale(rescale(x, 4), 12).order == rescale(x, 12).order


# -- add / sub -------------------------------------------------------------------


def test_add_examples():
    assert add(ONE_PLUS_Q, ONE_MINUS_Q) == QSeries.constant(2)
    x = truncate(euler(20), 20)
    assert add(x, QSeries.zero()) == x
    s = add(x, -x)
    assert s.is_zero()
    assert s.precision == 20


def test_add_order_is_minimum():
    a = truncate(euler(10), 10)
    b = truncate(euler(20), 6)
    assert add(a, b).precision == 6
    assert sub(a, b).precision == 6


def test_add_mixed_lattices():
    x = add(QSeries.monomial(1, Fraction(1, 2)), QSeries.monomial(1, Fraction(1, 3)))
    assert x.scale == 6


# -- mul -----------------------------------------------------------------------


def test_mul_examples():
    assert mul(ONE_MINUS_Q, ONE_PLUS_Q) == poly(1, 0, -1)
    assert mul(QSeries.monomial(1, -1), QSeries.monomial(1, 1)) == QSeries.constant(1)


def test_mul_associativity_by_expansion():
    a, b, c = poly(1, -1), poly(1, 0, -1), poly(1, 0, 0, -1)
    left = mul(mul(a, b), c)
    right = mul(a, mul(b, c))
    # (1-q)(1-q^2)(1-q^3) expanded by hand
    expected = poly(1, -1, -1, 0, 1, 1, -1)
    assert left.coeffs == right.coeffs == expected.coeffs


def test_mul_sound_truncation_rule():
    a = QSeries.from_terms({-2: 1, 0: 1}, order=10)
    b = QSeries.from_terms({1: 1, 3: 2}, order=8)
    # min(order_a + min_exp_b, order_b + min_exp_a)
    assert mul(a, b).precision == min(10 + 1, 8 - 2)


# -- div -----------------------------------------------------------------------


def test_div_exact_quotient():
    assert div(poly(1, 0, -1), ONE_MINUS_Q) == ONE_PLUS_Q


def test_div_geometric_series_oracle():
    g = div(QSeries.constant(1), ONE_MINUS_Q, 30)
    assert g.precision == 30
    assert all(coefficient_at(g, e) == 1 for e in range(31))


def test_div_self_is_one():
    x = truncate(euler(30), 30)
    assert div(x, x) == QSeries.constant(1)


def test_div_laurent_offsets():
    x = div(QSeries.monomial(3, 2), QSeries.monomial(Fraction(1, 2), 5))
    assert x == QSeries.monomial(6, -3)


def test_div_by_zero_series():
    with pytest.raises(SeriesZeroDivisionError):
        div(QSeries.constant(1), QSeries.zero(order=10), 5)
    with pytest.raises(SeriesZeroDivisionError):
        div(QSeries.constant(1), QSeries.zero())


def test_div_non_monic_unit():
    x = div(QSeries.constant(1), poly(2, 1), 6)
    assert coefficient_at(x, 0) == Fraction(1, 2)
    assert coefficient_at(x, 3) == Fraction(-1, 16)


# -- substitute_base -----------------------------------------------------------------


def test_substitute_base_examples():
    assert substitute_base(ONE_MINUS_Q, 2) == poly(1, 0, -1)
    assert substitute_base(QSeries.monomial(1, Fraction(1, 2)), 2) == QSeries.monomial(1, 1)


def test_substitute_base_against_direct_build():
    lifted = substitute_base(div(QSeries.constant(1), ONE_MINUS_Q, 20), 3)
    direct = div(QSeries.constant(1), poly(1, 0, 0, -1), 60)
    assert lifted.precision == 60
    assert equal_up_to(lifted, direct, 60)


# -- coefficient_at / equal_up_to -----------------------------------------------------


def test_coefficient_at_examples():
    assert coefficient_at(div(QSeries.constant(1), ONE_MINUS_Q, 10), 7) == 1
    assert coefficient_at(ONE_MINUS_Q, 0) == 1
    assert coefficient_at(euler(10), 2) == -1


def test_coefficient_at_out_of_range():
    with pytest.raises(OutOfRangeError):
        coefficient_at(truncate(euler(10), 10), 11)


def test_coefficient_at_off_lattice_is_zero():
    assert coefficient_at(ONE_PLUS_Q, Fraction(1, 2)) == 0


def test_equal_up_to_examples():
    a = ONE_PLUS_Q
    b = poly(1, 1, 0, 0, 0, 1)
    assert equal_up_to(a, b, 4)
    cmp = equal_up_to(a, b, 5)
    assert not cmp
    assert (cmp.exponent, cmp.lhs, cmp.rhs) == (5, 0, 1)
    x = truncate(euler(40), 40)
    assert equal_up_to(x, x, 40)


def test_equal_up_to_insufficient_precision():
    x = truncate(euler(10), 10)
    with pytest.raises(PrecisionError):
        equal_up_to(x, x, 11)


# -- properties --------------------------------------------------------------------

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def series(draw, unit=False):
    n = draw(st.integers(min_value=1, max_value=8))
    coeffs = draw(st.lists(small, min_size=n, max_size=n))
    start = draw(st.integers(min_value=-2, max_value=3))
    if unit and coeffs[0] == 0:
        coeffs[0] = Fraction(1)
    order = draw(st.integers(min_value=start + len(coeffs), max_value=start + 14))
    return QSeries.from_coefficients(coeffs, order=order, start=start)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@settings(max_examples=60, deadline=None)
@given(series(), series(unit=True))
def test_div_undoes_mul(a, b):
    q = div(mul(a, b), b)
    assert q.precision is not None
    assert equal_up_to(q, a, min(q.precision, a.precision))


@settings(max_examples=40, deadline=None)
@given(series(), series(), st.integers(min_value=1, max_value=4))
def test_substitute_base_is_multiplicative(a, b, m):
    lhs = substitute_base(mul(a, b), m)
    rhs = mul(substitute_base(a, m), substitute_base(b, m))
    assert lhs.precision == rhs.precision
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(series())
def test_rescale_property(a):
    assert rescale(rescale(a, 2), 6) == rescale(a, 6)
    assert rescale(a, 6).order == 6 * a.order
