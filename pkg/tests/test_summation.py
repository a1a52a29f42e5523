from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbailey.errors import ContractError, NonTerminationError
from qbailey.factory import euler, poch, tau, triple_product_rhs
from qbailey.series import Monomial, QSeries, add, div, equal_up_to, scale_by, truncate
from qbailey.summation import TermGenerator, recording, sum_bilateral, sum_unilateral

Q = Monomial(1, 1)


def rr_term(n, order):
    return div(QSeries.monomial(1, n * n), poch(Q, 1, n), order)


def test_rogers_ramanujan_sum_to_order_4():
    # n=0..2 contribute 1, q/(1-q), q^4/((1-q)(1-q^2))
    with recording() as recs:
        x = sum_unilateral(TermGenerator(rr_term, lambda n: n * n), 4)
    assert x == QSeries.from_coefficients([1, 1, 1, 1, 2], order=4)
    assert recs[-1].termination == "bound"


def test_zero_terms():
    x = sum_unilateral(TermGenerator(lambda n, o: QSeries.zero()), 10)
    assert x.is_zero()
    assert x.precision == 10


def test_vanishing_first_term():
    # (q^n - 1) q^(2n^2-n)/(q;q)_2n is zero at n = 0
    def term(n, o):
        return div((QSeries.monomial(1, n) - 1) * QSeries.monomial(1, 2 * n * n - n), poch(Q, 1, 2 * n), o)

    assert term(0, 10).is_zero()
    x = sum_unilateral(TermGenerator(term, lambda n: 2 * n * n - n), 30)
    y = sum_unilateral(TermGenerator(term, lambda n: 2 * n * n - n), 30, start=1)
    assert equal_up_to(x, y, 30)


def test_window_heuristic_is_flagged():
    with recording() as recs:
        x = sum_unilateral(TermGenerator(rr_term), 20)
    bounded = sum_unilateral(TermGenerator(rr_term, lambda n: n * n), 20)
    assert equal_up_to(x, bounded, 20)
    assert recs[-1].termination == "heuristic"


def test_bound_matches_wide_window():
    bound = sum_unilateral(TermGenerator(rr_term, lambda n: n * n), 60)
    wide = sum_unilateral(TermGenerator(rr_term), 60, window=16)
    assert equal_up_to(bound, wide, 60)


def test_bound_violation_is_contract_error():
    with pytest.raises(ContractError):
        sum_unilateral(TermGenerator(rr_term, lambda n: n * n + 1), 10)


def test_index_cap():
    with pytest.raises(NonTerminationError):
        sum_unilateral(TermGenerator(lambda n, o: QSeries.constant(1)), 5, index_cap=50)


def test_finite_range_is_exact():
    x = sum_unilateral(TermGenerator(lambda n, o: QSeries.monomial(1, n)), 100, start=2, stop=4)
    assert x.is_exact
    assert x == QSeries.from_terms({2: 1, 3: 1, 4: 1})


def test_bilateral_triple_product():
    x = Monomial(1, 2)

    def term(n, o):
        return truncate(tau(3, n).series() * (x ** n).series(), o)

    s = sum_bilateral(TermGenerator(term, lambda n: Fraction(3 * n * (n - 1), 2) + 2 * n), 12)
    assert equal_up_to(s, triple_product_rhs(x, 3, 12), 12)


def test_bilateral_antisymmetric_is_zero():
    def term(n, o):
        return QSeries.from_terms({abs(n): n})

    s = sum_bilateral(TermGenerator(term, lambda n: abs(n)), 30)
    assert s.is_zero()
    assert s.precision == 30


def test_h1_equals_euler_product():
    def term(k, o):
        return (tau(3, k).series() * (1 - QSeries.monomial(1, k))) * QSeries.monomial(1, 2 * k)

    def bound(k):
        return Fraction(3 * k * (k - 1), 2) + 2 * k + min(0, k)

    s = sum_bilateral(TermGenerator(term, bound), 30)
    assert equal_up_to(s, euler(30), 30)


def test_records_index_range():
    with recording() as recs:
        sum_bilateral(TermGenerator(lambda n, o: QSeries.monomial(1, n * n), lambda n: n * n), 16)
    rec = recs[-1]
    assert rec.kind == "bilateral"
    assert rec.first <= -4 and rec.last >= 4


coeffs = st.lists(st.integers(min_value=-3, max_value=3), min_size=1, max_size=5)


@settings(max_examples=30, deadline=None)
@given(coeffs, coeffs, st.integers(min_value=-2, max_value=2), st.integers(min_value=-2, max_value=2))
def test_linearity(fc, gc, a, b):
    def f(n, o):
        return QSeries.monomial(fc[n % len(fc)] or 1, n * n)

    def g(n, o):
        return QSeries.monomial(gc[n % len(gc)] or 1, n * n + n)

    def h(n, o):
        return add(scale_by(f(n, o), a), scale_by(g(n, o), b))

    order = 40
    lhs = sum_unilateral(TermGenerator(h, lambda n: n * n), order)
    rhs = add(
        scale_by(sum_unilateral(TermGenerator(f, lambda n: n * n), order), a),
        scale_by(sum_unilateral(TermGenerator(g, lambda n: n * n), order), b),
    )
    assert equal_up_to(lhs, rhs, order)
